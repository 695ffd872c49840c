#pragma once

// Estimators and exact formulas for the extremal Lyapunov exponents.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cocycle.hpp"
#include "measure.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lyap {

enum class Method { monte_carlo, exact_diagonal, furstenberg, enumeration_bound };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::monte_carlo: return "monte_carlo";
    case Method::exact_diagonal: return "exact_diagonal";
    case Method::furstenberg: return "furstenberg";
    case Method::enumeration_bound: return "enumeration_bound";
  }
  return "unknown";
}

struct ExponentEstimate {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double stderr_plus = 0.0;
  double stderr_minus = 0.0;
  std::uint64_t n_steps = 0;
  std::uint64_t n_trials = 0;
  Method method = Method::monte_carlo;
};

namespace detail {
struct TrialValue {
  double plus = 0.0, minus = 0.0;
};

// Mean and standard error over trials, merged in trial order.
inline ExponentEstimate summarize(const std::vector<TrialValue>& v, std::uint64_t n_steps) {
  ExponentEstimate e;
  e.n_steps = n_steps;
  e.n_trials = v.size();
  const double n = static_cast<double>(v.size());
  for (const auto& t : v) {
    e.lambda_plus += t.plus;
    e.lambda_minus += t.minus;
  }
  e.lambda_plus /= n;
  e.lambda_minus /= n;
  if (v.size() > 1) {
    double sp = 0.0, sm = 0.0;
    for (const auto& t : v) {
      sp += (t.plus - e.lambda_plus) * (t.plus - e.lambda_plus);
      sm += (t.minus - e.lambda_minus) * (t.minus - e.lambda_minus);
    }
    e.stderr_plus = std::sqrt(sp / (n - 1.0) / n);
    e.stderr_minus = std::sqrt(sm / (n - 1.0) / n);
  }
  return e;
}

inline void check_budget(std::uint64_t n_steps, std::uint64_t n_trials) {
  if (n_steps < 1 || n_trials < 1) throw InvalidParams("n_steps and n_trials must be at least 1");
}
}  // namespace detail

// Seed of Monte-Carlo trial t; trial t follows sample_path(a, n_steps, trial_seed(seed, t)).
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return derive_seed(seed, trial); }

// lambda_+ ~ (1/n) log sigma_1(L^n), lambda_- ~ (1/n) log sigma_2(L^n),
// averaged over independent trials.
inline ExponentEstimate estimate_extremal_mc(const FiniteCocycle& a, std::uint64_t n_steps, std::uint64_t n_trials,
                                             std::uint64_t seed) {
  detail::check_budget(n_steps, n_trials);
  std::vector<detail::TrialValue> values(n_trials);
  const SymbolSampler draw(a.weights());
  parallel_for(n_trials, [&](std::size_t t) {
    Stream rng(trial_seed(seed, t));
    WordProduct p;
    for (std::uint64_t i = 0; i < n_steps; ++i) {
      const Symbol s = draw(rng);
      p.direction = a.matrix(s) * p.direction;
      p.log_abs_det += a.log_abs_det(s);
      const double nrm = operator_norm(p.direction);
      p.direction /= nrm;
      p.log_scale += std::log(nrm);
    }
    const double n = static_cast<double>(n_steps);
    values[t] = {p.log_sigma1() / n, p.log_sigma2() / n};
  });
  return detail::summarize(values, n_steps);
}

// Same estimator for a window cocycle, evaluated along a path padded by the
// window radius on both sides.
inline ExponentEstimate estimate_extremal_mc(const WindowCocycle& w, std::uint64_t n_steps, std::uint64_t n_trials,
                                             std::uint64_t seed) {
  detail::check_budget(n_steps, n_trials);
  std::vector<detail::TrialValue> values(n_trials);
  const auto& table = w.table();
  std::vector<double> log_det(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) log_det[i] = std::log(std::abs(table[i].det()));
  parallel_for(n_trials, [&](std::size_t t) {
    const PathSample path = sample_path(w.weights(), n_steps + 2 * w.radius(), trial_seed(seed, t));
    const std::size_t m = table.alphabet(), len = table.length(), words = table.size();
    std::size_t idx = table.index(std::span(path.symbols).first(len - 1));
    WordProduct p;
    for (std::uint64_t i = 0; i < n_steps; ++i) {
      idx = (idx * m + path.symbols[i + len - 1]) % words;
      p.direction = table[idx] * p.direction;
      p.log_abs_det += log_det[idx];
      const double nrm = operator_norm(p.direction);
      p.direction /= nrm;
      p.log_scale += std::log(nrm);
    }
    const double n = static_cast<double>(n_steps);
    values[t] = {p.log_sigma1() / n, p.log_sigma2() / n};
  });
  return detail::summarize(values, n_steps);
}

// Exact exponents when every atom of positive weight is diagonal, diag(a_i, d_i): the
// axis growth rates are sum p_i log|a_i| and sum p_i log|d_i|. For
// unimodular atoms diag(t_i, 1/t_i) this is +-|sum p_i log|t_i||.
inline ExponentEstimate exact_diagonal(const FiniteCocycle& a, double tol = 1e-12) {
  double horizontal = 0.0, vertical = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Mat2C& m = a.matrix(i);
    if (a.weight(i) == 0.0) continue;
    if (std::abs(m.b) > tol || std::abs(m.c) > tol) throw NotDiagonal("exact_diagonal: atom has off-diagonal mass");
    horizontal += a.weight(i) * std::log(std::abs(m.a));
    vertical += a.weight(i) * std::log(std::abs(m.d));
  }
  ExponentEstimate e;
  e.lambda_plus = std::max(horizontal, vertical);
  e.lambda_minus = std::min(horizontal, vertical);
  e.method = Method::exact_diagonal;
  return e;
}

inline constexpr std::uint64_t default_enumeration_budget = 20'000'000;

namespace detail {
inline void enumerate_words(const FiniteCocycle& a, std::size_t depth_left, const WordProduct& prefix, double prob,
                            double& acc) {
  if (depth_left == 0) {
    acc += prob * (prefix.log_scale + std::log(operator_norm(prefix.direction)));
    return;
  }
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a.weight(s) == 0.0) continue;
    WordProduct next = prefix;
    next.direction = a.matrix(s) * next.direction;
    const double nrm = operator_norm(next.direction);
    next.direction /= nrm;
    next.log_scale += std::log(nrm);
    enumerate_words(a, depth_left - 1, next, prob * a.weight(s), acc);
  }
}
}  // namespace detail

// c_n = (1/n) sum over words w of length n of p(w) log ||A_w||, by exact
// depth-first enumeration sharing prefix products. The sequence n c_n is
// subadditive and c_n decreases to lambda_+.
inline double enumeration_upper_bound(const FiniteCocycle& a, std::size_t n,
                                      std::uint64_t budget = default_enumeration_budget) {
  if (n < 1) throw InvalidParams("enumeration_upper_bound: n must be at least 1");
  std::uint64_t words = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (words > budget / a.size()) throw BudgetExceeded("enumeration_upper_bound: m^n exceeds the word budget");
    words *= a.size();
  }
  double acc = 0.0;
  detail::enumerate_words(a, n, WordProduct{}, 1.0, acc);
  return acc / static_cast<double>(n);
}

// sum_i p_i int log(||A_i v|| / ||v||) d eta(v). Equals lambda_+ when eta is
// stationary and the cocycle is irreducible.
inline double furstenberg_integral(const FiniteCocycle& a, const ParticleMeasure& eta) {
  eta.require_normalized("furstenberg_integral");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.weight(i) == 0.0) continue;
    const Mat2C& m = a.matrix(i);
    out += a.weight(i) * eta.integrate([&m](const ProjPoint& v) {
      return 0.5 * std::log(std::norm(m.a * v.z1() + m.b * v.z2()) + std::norm(m.c * v.z1() + m.d * v.z2()));
    });
  }
  return out;
}

}  // namespace lyap
