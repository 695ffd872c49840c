#pragma once

// Locally constant cocycles over the Bernoulli shift: the one-coordinate
// (finite alphabet) case and the finite-window case, Bernoulli paths, and
// renormalized matrix products.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "projective.hpp"
#include "rng.hpp"

namespace lyap {

// Alphabet index, 0-based.
using Symbol = std::uint32_t;

namespace detail {
inline void check_weights(std::span<const double> w, const char* who) {
  if (w.empty()) throw InvalidCocycle(std::string(who) + ": empty weight vector");
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidCocycle(std::string(who) + ": weights must be finite and nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidCocycle(std::string(who) + ": weights must sum to 1");
}

inline void check_invertible(const Mat2C& m, const char* who) {
  if (!m.is_finite()) throw InvalidCocycle(std::string(who) + ": non-finite matrix entry");
  if (m.is_singular()) throw InvalidCocycle(std::string(who) + ": matrix is not invertible");
}
}  // namespace detail

// The pair (A, p): matrices A_0..A_{m-1} drawn i.i.d. with weights p.
class FiniteCocycle {
 public:
  FiniteCocycle(std::vector<Mat2C> matrices, std::vector<double> weights)
      : matrices_(std::move(matrices)), weights_(std::move(weights)) {
    if (matrices_.empty()) throw InvalidCocycle("cocycle needs at least one matrix");
    if (matrices_.size() != weights_.size()) throw InvalidCocycle("one weight per matrix required");
    detail::check_weights(weights_, "cocycle");
    log_abs_det_.reserve(matrices_.size());
    for (const auto& m : matrices_) {
      detail::check_invertible(m, "cocycle");
      log_abs_det_.push_back(std::log(std::abs(m.det())));
    }
  }

  static FiniteCocycle single(const Mat2C& m) { return {{m}, {1.0}}; }

  std::size_t size() const { return matrices_.size(); }
  const Mat2C& matrix(std::size_t i) const { return matrices_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double log_abs_det(std::size_t i) const { return log_abs_det_[i]; }
  const std::vector<Mat2C>& matrices() const { return matrices_; }
  const std::vector<double>& weights() const { return weights_; }

  // Matrices real up to rounding (imaginary parts <= tol).
  bool is_real(double tol = 0.0) const {
    return std::all_of(matrices_.begin(), matrices_.end(), [tol](const Mat2C& m) {
      return std::abs(m.a.imag()) <= tol && std::abs(m.b.imag()) <= tol &&
             std::abs(m.c.imag()) <= tol && std::abs(m.d.imag()) <= tol;
    });
  }

 private:
  std::vector<Mat2C> matrices_;
  std::vector<double> weights_;
  std::vector<double> log_abs_det_;
};

// Inverse-CDF sampler for a probability vector.
class SymbolSampler {
 public:
  explicit SymbolSampler(std::span<const double> weights) : cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
    last_ = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) last_ = static_cast<Symbol>(i);
  }

  Symbol operator()(Stream& rng) const {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < last_; ++i)
      if (u < cdf_[i]) return static_cast<Symbol>(i);
    return last_;
  }

 private:
  std::vector<double> cdf_;
  Symbol last_;
};

struct PathSample {
  std::uint64_t seed = 0;
  std::vector<Symbol> symbols;
};

inline PathSample sample_path(std::span<const double> weights, std::size_t length, std::uint64_t seed) {
  detail::check_weights(weights, "sample_path");
  PathSample path{seed, std::vector<Symbol>(length)};
  SymbolSampler draw(weights);
  Stream rng(seed);
  for (auto& s : path.symbols) s = draw(rng);
  return path;
}

inline PathSample sample_path(const FiniteCocycle& a, std::size_t length, std::uint64_t seed) {
  return sample_path(a.weights(), length, seed);
}

// sup_i ||A_i - B_i||, atoms paired by index.
inline double cocycle_distance(const FiniteCocycle& a, const FiniteCocycle& b) {
  if (a.size() != b.size()) throw AlphabetMismatch("cocycle_distance: alphabet sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, operator_norm(a.matrix(i) - b.matrix(i)));
  return d;
}

// Total variation sum_i |p_i - q_i|, i.e. sup over |phi| <= 1 of |int phi d(p - q)|.
inline double weight_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw AlphabetMismatch("weight_distance: alphabet sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

// L = exp(log_scale) * direction with ||direction|| = 1; log_abs_det is the
// exact sum of log|det| of the factors.
struct WordProduct {
  Mat2C direction = Mat2C::identity();
  double log_scale = 0.0;
  double log_abs_det = 0.0;

  double log_sigma1() const {
    const double s = log_scale + std::log(operator_norm(direction));
    return std::max(s, 0.5 * log_abs_det);
  }
  // Taken from the exact determinant, not from the (possibly underflowed)
  // small singular value of the direction part.
  double log_sigma2() const { return log_abs_det - log_sigma1(); }
};

// Left-multiplies the factors at(0), at(1), ..., at(n-1) (at(0) acts first),
// rescaling to unit operator norm after every step.
template <class MatrixAt>
WordProduct accumulate_product(std::size_t n, MatrixAt&& at) {
  WordProduct out;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2C& m = at(i);
    out.direction = m * out.direction;
    out.log_abs_det += std::log(std::abs(m.det()));
    const double s = operator_norm(out.direction);
    out.direction /= s;
    out.log_scale += std::log(s);
  }
  return out;
}

// L^n = A_{s_{n-1}} ... A_{s_1} A_{s_0}.
inline WordProduct word_product(const FiniteCocycle& a, std::span<const Symbol> symbols) {
  WordProduct out;
  for (Symbol s : symbols) {
    if (s >= a.size()) throw OutOfRange("word_product: symbol outside the alphabet");
    out.direction = a.matrix(s) * out.direction;
    out.log_abs_det += a.log_abs_det(s);
    const double n = operator_norm(out.direction);
    out.direction /= n;
    out.log_scale += std::log(n);
  }
  return out;
}

struct ScalarSplit {
  FiniteCocycle unimodular;
  std::vector<Complex> scalars;
};

// A_i = c_i B_i with c_i the principal square root of det A_i, det B_i = 1.
inline ScalarSplit scalar_split(const FiniteCocycle& a) {
  std::vector<Mat2C> b;
  std::vector<Complex> c;
  for (const auto& m : a.matrices()) {
    if (m.is_singular()) throw SingularMatrix();
    c.push_back(std::sqrt(m.det()));
    b.push_back(m / c.back());
  }
  return {FiniteCocycle(std::move(b), a.weights()), std::move(c)};
}

// {P A_i P^-1}.
inline FiniteCocycle conjugated(const FiniteCocycle& a, const Mat2C& p) {
  const Mat2C pinv = p.inverse();
  std::vector<Mat2C> out;
  for (const auto& m : a.matrices()) out.push_back(p * m * pinv);
  return {std::move(out), a.weights()};
}

// A table of matrices indexed by the window x_{-r} .. x_{r}, encoded as a
// base-m integer with x_{-r} the most significant digit. Entries need not be
// invertible (differences of cocycles live here too).
class WindowTable {
 public:
  WindowTable(std::size_t alphabet, std::size_t radius, std::vector<Mat2C> table)
      : alphabet_(alphabet), radius_(radius), table_(std::move(table)) {
    if (alphabet_ == 0) throw InvalidParams("window table: empty alphabet");
    if (table_.size() != word_count(alphabet_, radius_))
      throw InvalidParams("window table must list every word of length 2r+1");
  }

  static std::size_t word_count(std::size_t alphabet, std::size_t radius) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < 2 * radius + 1; ++i) {
      if (n > (std::size_t{1} << 40) / alphabet) throw BudgetExceeded("window table too large");
      n *= alphabet;
    }
    return n;
  }

  std::size_t alphabet() const { return alphabet_; }
  std::size_t radius() const { return radius_; }
  std::size_t length() const { return 2 * radius_ + 1; }
  std::size_t size() const { return table_.size(); }
  const Mat2C& operator[](std::size_t word) const { return table_[word]; }
  const std::vector<Mat2C>& entries() const { return table_; }

  // Index of the word symbols[0..2r] (symbols[0] is coordinate -r).
  std::size_t index(std::span<const Symbol> window) const {
    std::size_t idx = 0;
    for (Symbol s : window) {
      if (s >= alphabet_) throw OutOfRange("window symbol outside the alphabet");
      idx = idx * alphabet_ + s;
    }
    return idx;
  }

  // Symbol at coordinate j in [-r, r] of an encoded word.
  Symbol digit(std::size_t word, int j) const {
    std::size_t shift = radius_ - static_cast<std::size_t>(static_cast<long>(j));
    for (; shift > 0; --shift) word /= alphabet_;
    return static_cast<Symbol>(word % alphabet_);
  }

 private:
  std::size_t alphabet_, radius_;
  std::vector<Mat2C> table_;
};

inline WindowTable difference(const WindowTable& x, const WindowTable& y) {
  if (x.alphabet() != y.alphabet() || x.radius() != y.radius())
    throw AlphabetMismatch("window tables have different shapes");
  std::vector<Mat2C> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return {x.alphabet(), x.radius(), std::move(out)};
}

// A(x) depends on x_{-r}..x_{r}; the base is Bernoulli with the given weights.
class WindowCocycle {
 public:
  WindowCocycle(WindowTable table, std::vector<double> weights)
      : table_(std::move(table)), weights_(std::move(weights)) {
    if (weights_.size() != table_.alphabet()) throw InvalidCocycle("one weight per symbol required");
    detail::check_weights(weights_, "window cocycle");
    for (const auto& m : table_.entries()) detail::check_invertible(m, "window cocycle");
  }

  // The one-coordinate cocycle seen through a window of the given radius.
  static WindowCocycle from_finite(const FiniteCocycle& a, std::size_t radius) {
    const std::size_t m = a.size();
    std::vector<Mat2C> t(WindowTable::word_count(m, radius));
    std::size_t below = 1;
    for (std::size_t i = 0; i < radius; ++i) below *= m;
    for (std::size_t w = 0; w < t.size(); ++w) t[w] = a.matrix((w / below) % m);
    return {WindowTable(m, radius, std::move(t)), a.weights()};
  }

  const WindowTable& table() const { return table_; }
  std::size_t alphabet() const { return table_.alphabet(); }
  std::size_t radius() const { return table_.radius(); }
  const std::vector<double>& weights() const { return weights_; }

 private:
  WindowTable table_;
  std::vector<double> weights_;
};

// A(sigma^position(path)); needs path[position - r .. position + r].
inline const Mat2C& window_eval(const WindowCocycle& w, const PathSample& path, std::size_t position) {
  const std::size_t r = w.radius();
  if (position < r || position + r >= path.symbols.size())
    throw OutOfRange("window_eval: window leaves the sampled range");
  return w.table()[w.table().index(std::span(path.symbols).subspan(position - r, 2 * r + 1))];
}

inline double cocycle_distance(const WindowCocycle& a, const WindowCocycle& b) {
  const WindowTable d = difference(a.table(), b.table());
  double out = 0.0;
  for (const auto& m : d.entries()) out = std::max(out, operator_norm(m));
  return out;
}

// Default perturbation directions: an off-diagonal shear (upper for even
// atoms, lower for odd) mixed with half a rotation generator, normalized to
// operator norm 1. No line is invariant under every perturbed diagonal atom.
inline std::vector<Mat2C> default_perturbation_directions(std::size_t m) {
  const Mat2C rot{0.0, -1.0, 1.0, 0.0};
  std::vector<Mat2C> out;
  for (std::size_t i = 0; i < m; ++i) {
    Mat2C shear = (i % 2 == 0) ? Mat2C{0.0, 1.0, 0.0, 0.0} : Mat2C{0.0, 0.0, 1.0, 0.0};
    Mat2C d = shear + 0.5 * rot;
    out.push_back(d / operator_norm(d));
  }
  return out;
}

// A_i + gamma D_i / ||D_i||, so that cocycle_distance to the base is gamma
// (or less where D_i = 0). Weights move by gamma in total variation along
// weight_direction (which must sum to zero), when one is given.
inline FiniteCocycle perturb(const FiniteCocycle& base, double gamma, std::span<const Mat2C> directions,
                             std::span<const double> weight_direction = {}) {
  if (!(gamma >= 0.0)) throw InvalidParams("perturbation size must be nonnegative");
  if (directions.size() != base.size()) throw AlphabetMismatch("one perturbation direction per atom required");
  std::vector<Mat2C> mats;
  for (std::size_t i = 0; i < base.size(); ++i) {
    Mat2C m = base.matrix(i);
    const double n = operator_norm(directions[i]);
    if (n > 0.0) m = m + (gamma / n) * directions[i];
    if (m.is_singular()) throw PerturbationLeavesGL("perturbed atom " + std::to_string(i) + " is singular");
    mats.push_back(m);
  }
  std::vector<double> w = base.weights();
  if (!weight_direction.empty()) {
    if (weight_direction.size() != w.size()) throw AlphabetMismatch("weight direction has the wrong length");
    double l1 = 0.0, sum = 0.0;
    for (double u : weight_direction) {
      l1 += std::abs(u);
      sum += u;
    }
    if (std::abs(sum) > 1e-12) throw InvalidParams("weight direction must sum to zero");
    if (l1 > 0.0) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] += gamma * weight_direction[i] / l1;
        if (!(w[i] > 0.0)) throw InvalidParams("weight perturbation leaves the open simplex");
      }
    }
  }
  return {std::move(mats), std::move(w)};
}

}  // namespace lyap
