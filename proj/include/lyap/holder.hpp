#pragma once

// The Holder discontinuity construction over the two-symbol shift.
//
// Symbols are 0-based here: symbol 0 stands for "1" and symbol 1 for "2".
// The unperturbed cocycle is A(x) = diag(s, 1/s) if x_0 = 0 and
// diag(1/s, s) if x_0 = 1, with exponents +-|p_0 - p_1| log s. For k >= 1 and
// n = 2k + 1 the cylinder Z_n fixes x_0 .. x_{2k} to the word
// (1, ..., 1, 0, ..., 0): k ones then k + 1 zeros. With eps_n = s^-k and
// delta_n = atan(eps_n) the perturbation is B_n = A R_n where
//
//   R_n(x) = rotation by delta_n        if x in f^k(Z_n),
//            [[1, 0], [eps_n, 1]]       if x in Z_n or f^{2k}(Z_n),
//            identity                   otherwise.
//
// B_n(x) reads x_{-2k} .. x_{2k}, so it is stored as a window cocycle of
// radius 2k. Along any x in Z_n the n-step product swaps the horizontal and
// vertical axes, which forces the exponents of B_n to vanish while
// ||B_n - A|| in the r-Holder norm decays like (2^{2r}/s)^k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "exponents.hpp"

namespace lyap {

// Window tables above this many words are refused (k <= 4 for two symbols).
inline constexpr std::size_t holder_word_budget = std::size_t{1} << 17;

class HolderConstruction {
 public:
  HolderConstruction(double sigma, int k, std::array<double, 2> weights) : sigma_(sigma), k_(k), weights_(weights) {
    if (!(sigma > 1.0) || !std::isfinite(sigma)) throw InvalidParams("construction: sigma must be finite and > 1");
    if (k < 1) throw InvalidParams("construction: k must be at least 1");
    if (!(weights[0] > 0.0) || !(weights[1] > 0.0) || std::abs(weights[0] + weights[1] - 1.0) > 1e-12)
      throw InvalidParams("construction: weights must be positive and sum to 1");
    if (WindowTable::word_count(2, radius()) > holder_word_budget)
      throw BudgetExceeded("construction: window table for this k exceeds the word budget");
    eps_ = std::pow(sigma, -k);
    delta_ = std::atan(eps_);
    for (int i = 0; i < n(); ++i) cylinder_.push_back(i < k ? 1 : 0);
  }

  double sigma() const { return sigma_; }
  int k() const { return k_; }
  int n() const { return 2 * k_ + 1; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  std::size_t radius() const { return static_cast<std::size_t>(2 * k_); }
  const std::array<double, 2>& weights() const { return weights_; }
  std::vector<double> weight_vector() const { return {weights_[0], weights_[1]}; }
  // The word fixed on coordinates 0 .. 2k by Z_n.
  const std::vector<Symbol>& cylinder_word() const { return cylinder_; }
  // p_0 != p_1, i.e. A has nonzero exponents.
  bool discontinuity_claim() const { return weights_[0] != weights_[1]; }

  // mu(Z_n) = p_1^k p_0^{k+1}.
  double cylinder_measure() const { return std::pow(weights_[1], k_) * std::pow(weights_[0], k_ + 1); }
  // |p_0 - p_1| log sigma.
  double unperturbed_lambda() const { return std::abs(weights_[0] - weights_[1]) * std::log(sigma_); }

  Mat2C a_matrix(Symbol s) const {
    return s == 0 ? Mat2C::diag(sigma_, 1.0 / sigma_) : Mat2C::diag(1.0 / sigma_, sigma_);
  }
  FiniteCocycle unperturbed() const { return {{a_matrix(0), a_matrix(1)}, weight_vector()}; }

  // window[j + 2k] = x_j for j in [-2k, 2k]. True iff x is in f^shift(Z_n).
  bool in_shifted_cylinder(std::span<const Symbol> window, int shift) const {
    const int r = static_cast<int>(radius());
    for (int i = 0; i < n(); ++i)
      if (window[static_cast<std::size_t>(i - shift + r)] != cylinder_[static_cast<std::size_t>(i)]) return false;
    return true;
  }

  Mat2C rotation() const { return Mat2C::rotation(delta_); }
  Mat2C shear() const { return {1.0, 0.0, eps_, 1.0}; }

  Mat2C perturbation(std::span<const Symbol> window) const {
    if (in_shifted_cylinder(window, k_)) return rotation();
    if (in_shifted_cylinder(window, 0) || in_shifted_cylinder(window, 2 * k_)) return shear();
    return Mat2C::identity();
  }

  Mat2C perturbed_matrix(std::span<const Symbol> window) const {
    return a_matrix(window[radius()]) * perturbation(window);
  }

  // B_n as a window cocycle of radius 2k.
  WindowCocycle perturbed() const { return build_table(true); }
  // A through the same window, for table-level comparisons with B_n.
  WindowCocycle unperturbed_window() const { return build_table(false); }

 private:
  WindowCocycle build_table(bool with_perturbation) const {
    const std::size_t len = 2 * radius() + 1;
    const std::size_t words = WindowTable::word_count(2, radius());
    std::vector<Mat2C> t(words);
    std::vector<Symbol> window(len);
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t j = 0; j < len; ++j) window[j] = static_cast<Symbol>((w >> (len - 1 - j)) & 1u);
      t[w] = with_perturbation ? perturbed_matrix(window) : a_matrix(window[radius()]);
    }
    return {WindowTable(2, radius(), std::move(t)), weight_vector()};
  }

  double sigma_;
  int k_;
  std::array<double, 2> weights_;
  double eps_ = 0.0, delta_ = 0.0;
  std::vector<Symbol> cylinder_;
};

inline HolderConstruction build_construction(double sigma, int k, std::array<double, 2> weights) {
  return {sigma, k, weights};
}

// Dyadic metric d(x, y) = 2^-N(x, y), N the largest integer with x_i = y_i
// for all |i| < N, and the exponent r of the Holder norm.
struct ShiftMetricParams {
  double r = 1.0;

  explicit ShiftMetricParams(double exponent) : r(exponent) {
    if (!(r > 0.0)) throw InvalidParams("Holder exponent must be positive");
  }
  // Regime in which the construction is a discontinuity point: 2^{2r} < sigma.
  bool discontinuity_regime(double sigma) const { return std::pow(2.0, 2.0 * r) < sigma; }
};

struct SwapStage {
  std::string name;
  double angle_error = 0.0;
  bool passed = false;
};

struct SwapCheck {
  std::vector<SwapStage> stages;
  bool all_passed() const {
    for (const auto& s : stages)
      if (!s.passed) return false;
    return true;
  }
  double max_error() const {
    double e = 0.0;
    for (const auto& s : stages) e = std::max(e, s.angle_error);
    return e;
  }
};

// Checks the axis swap along the point x = shift^position(path), which must
// lie in Z_n. The path has to cover coordinates position - 2k ..
// position + n - 1 + 2k. Stages (H horizontal, V vertical, B^j the j-step
// product B(f^{j-1} x) ... B(x)):
//   B^k H = [eps : 1],  B^k V = V,  B^{k+1} H = V,  B^{2k} H = V,
//   B^{2k} V = [-1 : eps],  B^n H = V,  B^n V = H.
inline SwapCheck verify_subspace_swap(const HolderConstruction& c, const PathSample& path, std::size_t position,
                                      double tol = 1e-10) {
  const std::size_t r = c.radius();
  const auto n = static_cast<std::size_t>(c.n());
  if (position < r || position + n - 1 + r >= path.symbols.size())
    throw OutOfRange("verify_subspace_swap: path does not cover the windows of the first n iterates");
  const auto& w = c.cylinder_word();
  for (std::size_t i = 0; i < n; ++i)
    if (path.symbols[position + i] != w[i]) throw WordNotInCylinder("verify_subspace_swap: point is not in Z_n");

  // partial[j] = B^j(x), exact products without rescaling.
  std::vector<Mat2C> partial{Mat2C::identity()};
  for (std::size_t i = 0; i < n; ++i) {
    const auto window = std::span(path.symbols).subspan(position + i - r, 2 * r + 1);
    partial.push_back(c.perturbed_matrix(window) * partial.back());
  }
  const ProjPoint h = ProjPoint::horizontal(), v = ProjPoint::vertical();
  const auto k = static_cast<std::size_t>(c.k());
  SwapCheck out;
  auto stage = [&](std::string name, std::size_t j, const ProjPoint& from, const ProjPoint& to) {
    const double e = angle_between(proj_apply(partial[j], from), to);
    out.stages.push_back({std::move(name), e, e <= tol});
  };
  stage("B^k H = [eps:1]", k, h, ProjPoint(c.eps(), 1.0));
  stage("B^k V = V", k, v, v);
  stage("B^{k+1} H = V", k + 1, h, v);
  stage("B^{2k} H = V", 2 * k, h, v);
  stage("B^{2k} V = [-1:eps]", 2 * k, v, ProjPoint(-1.0, c.eps()));
  stage("B^n H = V", n, h, v);
  stage("B^n V = H", n, v, h);
  return out;
}

struct HolderNorm {
  double sup_term = 0.0;       // sup_x ||L(x)||
  double quotient_term = 0.0;  // sup_{x != y} ||L(x) - L(y)|| / d(x, y)^r
  double total() const { return sup_term + quotient_term; }
};

// Exact r-Holder norm of a window-constant L. Pairs agreeing on |i| < N have
// d <= 2^-N, and each pair is counted exactly at N = N(x, y), so the quotient
// term is max over N = 0 .. radius of 2^{rN} times the largest difference
// within a class of window words sharing their core x_{-N+1} .. x_{N-1}.
// Pairs with N > radius have equal windows and contribute nothing.
inline HolderNorm holder_seminorm(const WindowTable& l, const ShiftMetricParams& params) {
  if (l.size() > holder_word_budget) throw BudgetExceeded("holder_seminorm: window table exceeds the word budget");
  HolderNorm out;
  for (const auto& m : l.entries()) out.sup_term = std::max(out.sup_term, operator_norm(m));

  const std::size_t m = l.alphabet(), r = l.radius();
  for (std::size_t core = 0; core <= r; ++core) {
    // core = N; the class key is the digits at coordinates |i| < N.
    std::size_t below = 1, classes = 1;
    if (core > 0) {
      for (std::size_t i = 0; i < r - core + 1; ++i) below *= m;
      for (std::size_t i = 0; i < 2 * core - 1; ++i) classes *= m;
    }
    std::vector<std::vector<Mat2C>> distinct(classes);
    for (std::size_t w = 0; w < l.size(); ++w) {
      auto& bucket = distinct[core == 0 ? 0 : (w / below) % classes];
      if (std::find(bucket.begin(), bucket.end(), l[w]) == bucket.end()) bucket.push_back(l[w]);
    }
    double diam = 0.0;
    for (const auto& bucket : distinct)
      for (std::size_t i = 0; i < bucket.size(); ++i)
        for (std::size_t j = i + 1; j < bucket.size(); ++j) diam = std::max(diam, operator_norm(bucket[i] - bucket[j]));
    out.quotient_term = std::max(out.quotient_term, std::pow(2.0, params.r * static_cast<double>(core)) * diam);
  }
  return out;
}

// 3 sigma (2^{2r}/sigma)^k.
inline double holder_bound(double sigma, double r, int k) {
  return 3.0 * sigma * std::pow(std::pow(2.0, 2.0 * r) / sigma, k);
}

inline HolderNorm construction_holder_norm(const HolderConstruction& c, const ShiftMetricParams& params) {
  return holder_seminorm(difference(c.perturbed().table(), c.unperturbed_window().table()), params);
}

struct VanishingCheck {
  ExponentEstimate perturbed;  // Monte-Carlo estimate for B_n
  double unperturbed = 0.0;    // |p_0 - p_1| log sigma
  // |lambda_+(B_n) - lambda_+(A)| exceeds 3 standard errors.
  bool distinguishable = false;
};

inline VanishingCheck vanishing_exponent_check(const HolderConstruction& c, std::uint64_t n_steps,
                                               std::uint64_t n_trials, std::uint64_t seed) {
  VanishingCheck out;
  out.perturbed = estimate_extremal_mc(c.perturbed(), n_steps, n_trials, seed);
  out.unperturbed = c.unperturbed_lambda();
  out.distinguishable =
      std::abs(out.perturbed.lambda_plus - out.unperturbed) > 3.0 * out.perturbed.stderr_plus;
  return out;
}

enum class Variant { unperturbed, perturbed };

struct InducedReturn {
  double mean_return = 0.0;
  double induced_lambda = 0.0;
  std::size_t n_returns = 0;
  double expected_mean_return = 0.0;  // 1 / mu(Z_n)
};

inline constexpr std::size_t minimum_returns = 100;

// Follows one Bernoulli path of n_steps symbols, records the visits to Z_n
// and multiplies the cocycle from the first visit to the last one. With R
// returns spanning T steps: mean_return = T / R and induced_lambda =
// log sigma_1(product) / R, the top exponent of the first-return cocycle.
inline InducedReturn induced_return_experiment(const HolderConstruction& c, Variant variant, std::uint64_t n_steps,
                                               std::uint64_t seed) {
  const WindowCocycle w = variant == Variant::perturbed ? c.perturbed() : c.unperturbed_window();
  const std::size_t r = c.radius(), len = 2 * r + 1;
  const PathSample path = sample_path(c.weight_vector(), n_steps + 2 * r, seed);
  const auto& word = c.cylinder_word();

  auto visits = [&](std::size_t pos) {
    for (std::size_t i = 0; i < word.size(); ++i)
      if (path.symbols[pos + i] != word[i]) return false;
    return true;
  };

  std::size_t first = 0, last = 0, count = 0;
  WordProduct running, at_last;
  std::size_t idx = w.table().index(std::span(path.symbols).first(len - 1));
  for (std::size_t pos = r; pos < r + n_steps; ++pos) {
    idx = (idx * 2 + path.symbols[pos + r]) % w.table().size();
    if (visits(pos)) {
      if (count == 0) first = pos;
      last = pos;
      at_last = running;
      ++count;
    }
    if (count > 0) {
      const Mat2C& m = w.table()[idx];
      running.direction = m * running.direction;
      running.log_abs_det += std::log(std::abs(m.det()));
      const double nrm = operator_norm(running.direction);
      running.direction /= nrm;
      running.log_scale += std::log(nrm);
    }
  }
  if (count < minimum_returns + 1)
    throw InsufficientReturns("induced_return_experiment: only " + std::to_string(count) + " visits to Z_n");
  InducedReturn out;
  out.n_returns = count - 1;
  const double returns = static_cast<double>(out.n_returns);
  out.mean_return = static_cast<double>(last - first) / returns;
  out.induced_lambda = at_last.log_sigma1() / returns;
  out.expected_mean_return = 1.0 / c.cylinder_measure();
  return out;
}

// A_0 = diag(sigma, 1/sigma), A_1 = rotation by pi/2, weights (p1, 1 - p1).
// Exponents are +-log sigma at p1 = 1 and vanish for every p1 < 1.
inline FiniteCocycle kifer_family(double sigma, double p1) {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw InvalidParams("kifer_family: sigma must be finite and > 1");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidParams("kifer_family: p1 must lie in [0, 1]");
  return {{Mat2C::diag(sigma, 1.0 / sigma), Mat2C{0.0, -1.0, 1.0, 0.0}}, {p1, 1.0 - p1}};
}

}  // namespace lyap
