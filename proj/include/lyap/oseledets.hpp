#pragma once

// Finite-time approximants of the Oseledets directions and the
// convergence-in-measure experiment for nearby cocycles.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cocycle.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lyap {

struct OseledetsFrame {
  ProjPoint unstable;
  ProjPoint stable;
  std::size_t depth = 0;
  double gap_estimate = 0.0;  // (log sigma_1 - log sigma_2) / depth of the backward product
};

// Directions are unresolved when sigma_1 / sigma_2 < 1 + 1e-6.
inline constexpr double degenerate_gap_ratio = 1e-6;

namespace detail {
inline void require_gap(const WordProduct& p, const char* who) {
  if (p.log_sigma1() - p.log_sigma2() < std::log1p(degenerate_gap_ratio))
    throw DegenerateGap(std::string(who) + ": singular values too close to resolve a direction");
}
}  // namespace detail

// E^u at x from the past x_{-n} .. x_{-1} (oldest first): the most expanded
// image direction of A_{x_{-1}} ... A_{x_{-n}}.
inline ProjPoint estimate_unstable(const FiniteCocycle& a, std::span<const Symbol> past) {
  if (past.empty()) throw InvalidParams("estimate_unstable: empty past word");
  const WordProduct p = word_product(a, past);
  detail::require_gap(p, "estimate_unstable");
  return top_left_singular(p.direction);
}

// E^s at x from the future x_0 .. x_{n-1}: the most contracted input
// direction of A_{x_{n-1}} ... A_{x_0}, taken as the orthogonal complement of
// the most expanded one so that it survives underflow of sigma_2.
inline ProjPoint estimate_stable(const FiniteCocycle& a, std::span<const Symbol> future) {
  if (future.empty()) throw InvalidParams("estimate_stable: empty future word");
  const WordProduct p = word_product(a, future);
  detail::require_gap(p, "estimate_stable");
  return orthogonal(top_right_singular(p.direction));
}

inline OseledetsFrame estimate_frame(const FiniteCocycle& a, std::span<const Symbol> past,
                                     std::span<const Symbol> future) {
  const WordProduct back = word_product(a, past);
  return {estimate_unstable(a, past), estimate_stable(a, future), past.size(),
          std::max(0.0, back.log_sigma1() - back.log_sigma2()) / static_cast<double>(past.size())};
}

struct AngleExperimentResult {
  double fraction = 0.0;  // among points where both frames were resolved
  std::size_t n_points = 0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;  // DegenerateGap for A or B
  std::size_t depth = 0;
  double eps = 0.0;
};

// For n_points Bernoulli words (past and future truncated at `depth`, drawn
// with A's weights), the fraction on which both the unstable and the stable
// directions of A and B are within angle eps.
inline AngleExperimentResult angle_convergence_experiment(const FiniteCocycle& a, const FiniteCocycle& b, double eps,
                                                          std::size_t depth, std::size_t n_points,
                                                          std::uint64_t seed) {
  if (a.size() != b.size()) throw AlphabetMismatch("angle_convergence_experiment: alphabet sizes differ");
  if (depth < 1 || n_points < 1) throw InvalidParams("angle_convergence_experiment: depth and n_points must be positive");
  enum Outcome : unsigned char { excluded, close, far };
  std::vector<Outcome> outcome(n_points);
  const SymbolSampler draw(a.weights());
  parallel_for(n_points, [&](std::size_t i) {
    Stream rng(seed, i);
    std::vector<Symbol> past(depth), future(depth);
    for (auto& s : past) s = draw(rng);
    for (auto& s : future) s = draw(rng);
    try {
      const double du = angle_between(estimate_unstable(a, past), estimate_unstable(b, past));
      const double ds = angle_between(estimate_stable(a, future), estimate_stable(b, future));
      outcome[i] = (du <= eps && ds <= eps) ? close : far;
    } catch (const DegenerateGap&) {
      outcome[i] = excluded;
    }
  });
  AngleExperimentResult r;
  r.n_points = n_points;
  r.depth = depth;
  r.eps = eps;
  std::size_t hits = 0;
  for (Outcome o : outcome) {
    if (o == excluded) ++r.n_excluded;
    else ++r.n_used, hits += (o == close);
  }
  r.fraction = r.n_used ? static_cast<double>(hits) / static_cast<double>(r.n_used) : 0.0;
  return r;
}

}  // namespace lyap
