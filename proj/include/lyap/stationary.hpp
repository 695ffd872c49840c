#pragma once

// Stationary measures on P(C^2): the push-forward transfer operator
// eta -> sum_i p_i (A_i)_* eta on particle clouds, a weak* residual, a
// Cesaro fixed-point solver, and the backward-iteration u-state sampler.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cocycle.hpp"
#include "measure.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace lyap {

// Point of the unit sphere corresponding to [z1:z2] (Hopf map); phase free.
struct Bloch {
  double x, y, z;
};

inline Bloch bloch(const ProjPoint& p) {
  const Complex cross = p.z1() * std::conj(p.z2());
  return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(p.z1()) - std::norm(p.z2())};
}

// Residual test dictionary, version 1. Every function is smooth on P(C^2) and
// bounded by 1 in absolute value:
//   0..18   monomials x^i y^j z^k of degree 1..3 in the Bloch coordinates,
//   19..34  bumps exp(-4 (1 - <n, c>)) centred at 16 equispaced points of the
//           real projective line (the great circle y = 0),
//   35..63  the same bumps centred at a 29-point Fibonacci lattice.
inline constexpr int dictionary_version = 1;
inline constexpr std::size_t dictionary_size = 64;

namespace detail {
struct DictionaryCentres {
  std::array<Bloch, 45> c{};
  DictionaryCentres() {
    for (int j = 0; j < 16; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 16.0;
      c[j] = {std::sin(t), 0.0, std::cos(t)};
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < 29; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / 29.0;
      const double r = std::sqrt(1.0 - z * z);
      c[16 + j] = {r * std::cos(golden * j), r * std::sin(golden * j), z};
    }
  }
};

inline const DictionaryCentres& centres() {
  static const DictionaryCentres c;
  return c;
}
}  // namespace detail

inline std::array<double, dictionary_size> dictionary_values(const ProjPoint& p) {
  std::array<double, dictionary_size> f{};
  const Bloch n = bloch(p);
  std::size_t k = 0;
  for (int deg = 1; deg <= 3; ++deg)
    for (int i = deg; i >= 0; --i)
      for (int j = deg - i; j >= 0; --j) {
        const int l = deg - i - j;
        f[k++] = std::pow(n.x, i) * std::pow(n.y, j) * std::pow(n.z, l);
      }
  for (const Bloch& c : detail::centres().c) f[k++] = std::exp(-4.0 * (1.0 - (n.x * c.x + n.y * c.y + n.z * c.z)));
  return f;
}

namespace detail {
// Integrals of the dictionary against eta.
inline std::array<double, dictionary_size> dictionary_integrals(const ParticleMeasure& eta) {
  std::array<double, dictionary_size> out{};
  for (const auto& p : eta.particles()) {
    const auto f = dictionary_values(p.point);
    for (std::size_t k = 0; k < dictionary_size; ++k) out[k] += p.weight * f[k];
  }
  return out;
}

inline double max_abs_difference(const std::array<double, dictionary_size>& x,
                                 const std::array<double, dictionary_size>& y) {
  double r = 0.0;
  for (std::size_t k = 0; k < dictionary_size; ++k) r = std::max(r, std::abs(x[k] - y[k]));
  return r;
}
}  // namespace detail

// eta -> sum_i p_i (A_i)_* eta, exactly: one output particle per (atom, particle).
inline ParticleMeasure transfer_step(const FiniteCocycle& a, const ParticleMeasure& eta) {
  eta.require_normalized("transfer_step");
  std::vector<Particle> out;
  out.reserve(a.size() * eta.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.weight(i) == 0.0) continue;
    for (const auto& p : eta.particles()) out.push_back({proj_apply(a.matrix(i), p.point), a.weight(i) * p.weight});
  }
  return ParticleMeasure(std::move(out));
}

// Systematic resampling to `budget` equally weighted particles using the
// single offset u0 in [0, 1). Particle order is preserved.
inline ParticleMeasure resample_systematic(const ParticleMeasure& eta, std::size_t budget, double u0) {
  if (budget == 0) throw InvalidParams("resampling budget must be positive");
  const auto ps = eta.particles();
  if (ps.empty()) throw UnnormalizedMeasure("cannot resample an empty measure");
  const double total = eta.total_mass();
  std::vector<Particle> out;
  out.reserve(budget);
  const double w = 1.0 / static_cast<double>(budget);
  double cum = ps[0].weight / total;
  std::size_t i = 0;
  for (std::size_t j = 0; j < budget; ++j) {
    const double u = (u0 + static_cast<double>(j)) * w;
    while (u >= cum && i + 1 < ps.size()) cum += ps[++i].weight / total;
    out.push_back({ps[i].point, w});
  }
  return ParticleMeasure(std::move(out));
}

// transfer_step followed by systematic resampling back to `budget` particles.
inline ParticleMeasure transfer_step(const FiniteCocycle& a, const ParticleMeasure& eta, std::size_t budget,
                                     std::uint64_t seed) {
  Stream rng(seed);
  return resample_systematic(transfer_step(a, eta), budget, rng.uniform());
}

// max over the test dictionary of |int f d(T eta) - int f d eta|, a
// computable stand-in for the weak* distance between eta and its image.
inline double residual(const FiniteCocycle& a, const ParticleMeasure& eta) {
  return detail::max_abs_difference(detail::dictionary_integrals(transfer_step(a, eta)),
                                    detail::dictionary_integrals(eta));
}

struct StationaryOptions {
  std::size_t particle_budget = 10'000;
  std::size_t max_iters = 512;
  double tol = 1e-3;
  std::uint64_t seed = 0;
};

struct StationarySolution {
  ParticleMeasure measure;
  double residual = 0.0;         // residual() of the returned measure
  double cesaro_residual = 0.0;  // residual of the exact block average
  std::size_t iterations = 0;
  std::size_t block_length = 0;  // iterates averaged into the returned measure
  bool converged = false;
};

// Iterates eta_{t+1} = resample(T eta_t) from the uniform real measure and
// averages the orbit over dyadic blocks of iterations [2^j, 2^{j+1}). A block
// is accepted once the residual of its exact average,
// max_f |(1/L) sum_t (int f dT eta_t - int f d eta_t)|, is at most tol. The
// returned cloud is a reservoir sample of the block average at the budget.
// When max_iters runs out the last complete block is returned with
// converged = false; see require_converged().
inline StationarySolution solve_stationary(const FiniteCocycle& a, const StationaryOptions& opt) {
  if (opt.particle_budget < 100) throw InvalidParams("solve_stationary: particle budget must be at least 100");
  if (opt.max_iters < 1) throw InvalidParams("solve_stationary: max_iters must be at least 1");
  const std::size_t n = opt.particle_budget;
  const std::uint64_t resample_seed = derive_seed(opt.seed, 0), reservoir_seed = derive_seed(opt.seed, 1);

  ParticleMeasure eta = ParticleMeasure::uniform_real(n);
  std::vector<Particle> reservoir;
  std::array<double, dictionary_size> drift{};
  std::size_t block_start = 0, block_end = 1;
  StationarySolution best;
  bool have_block = false;

  for (std::size_t t = 0; t < opt.max_iters; ++t) {
    const ParticleMeasure pushed = transfer_step(a, eta);
    const auto before = detail::dictionary_integrals(eta);
    const auto after = detail::dictionary_integrals(pushed);
    for (std::size_t k = 0; k < dictionary_size; ++k) drift[k] += after[k] - before[k];

    const std::size_t count = t - block_start + 1;
    const auto ps = eta.particles();
    if (count == 1) {
      reservoir.assign(ps.begin(), ps.end());
    } else {
      Stream rng(reservoir_seed, t);
      for (std::size_t j = 0; j < n; ++j)
        if (rng.uniform() * static_cast<double>(count) < 1.0) reservoir[j] = ps[j];
    }

    Stream rng(resample_seed, t);
    eta = resample_systematic(pushed, n, rng.uniform());

    if (t + 1 == block_end) {
      double r = 0.0;
      for (double d : drift) r = std::max(r, std::abs(d));
      r /= static_cast<double>(count);
      best.measure = ParticleMeasure(reservoir);
      best.cesaro_residual = r;
      best.iterations = t + 1;
      best.block_length = count;
      best.converged = r <= opt.tol;
      have_block = true;
      if (best.converged) break;
      block_start = t + 1;
      block_end = 2 * (t + 1);
      drift.fill(0.0);
    }
  }
  if (!have_block) throw InvalidParams("solve_stationary: no complete averaging block");
  best.residual = residual(a, best.measure);
  return best;
}

inline StationarySolution solve_stationary(const FiniteCocycle& a, std::size_t particle_budget,
                                           std::size_t max_iters, double tol, std::uint64_t seed) {
  return solve_stationary(a, StationaryOptions{particle_budget, max_iters, tol, seed});
}

inline const StationarySolution& require_converged(const StationarySolution& s) {
  if (!s.converged)
    throw NotConverged("stationary solver stopped after " + std::to_string(s.iterations) +
                       " iterations with block residual " + std::to_string(s.cesaro_residual));
  return s;
}

// Mass of the particles lying within projective angle eps of `direction`.
inline double directional_mass(const ParticleMeasure& eta, const ProjPoint& direction, double eps) {
  double m = 0.0;
  for (const auto& p : eta.particles())
    if (angle_between(p.point, direction) < eps) m += p.weight;
  return m;
}

struct UStateSample {
  std::vector<Symbol> past_word;  // x_{-depth} .. x_{-1}, oldest first
  ProjPoint point;
  std::size_t depth = 0;
};

inline const ProjPoint& default_seed_point() {
  static const ProjPoint p(1.0, 1.0);
  return p;
}

// Sample i draws x_{-1}, x_{-2}, ... from stream (seed, i), so samples at
// different depths with the same seed share their most recent symbols, and
// returns A_{x_{-1}} ... A_{x_{-depth}} applied to the seed point.
inline std::vector<UStateSample> ustate_backward_sample(const FiniteCocycle& a, std::size_t depth,
                                                        std::size_t n_samples, std::uint64_t seed,
                                                        const ProjPoint& seed_point = default_seed_point()) {
  if (depth < 1) throw InvalidParams("ustate_backward_sample: depth must be at least 1");
  std::vector<UStateSample> out(n_samples);
  const SymbolSampler draw(a.weights());
  parallel_for(n_samples, [&](std::size_t i) {
    Stream rng(seed, i);
    std::vector<Symbol> word(depth);
    for (std::size_t j = 0; j < depth; ++j) word[depth - 1 - j] = draw(rng);
    ProjPoint v = seed_point;
    for (Symbol s : word) v = proj_apply(a.matrix(s), v);
    out[i] = {std::move(word), v, depth};
  });
  return out;
}

// 1 - |mean Bloch vector|: 0 for samples at a single point, near 1 when the
// samples are spread out (or split between antipodal directions).
inline double ustate_dispersion(const std::vector<UStateSample>& samples) {
  if (samples.empty()) return 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  for (const auto& s : samples) {
    const Bloch b = bloch(s.point);
    x += b.x;
    y += b.y;
    z += b.z;
  }
  const double n = static_cast<double>(samples.size());
  return 1.0 - std::sqrt(x * x + y * y + z * z) / n;
}

inline constexpr double concentration_threshold = 0.05;

inline bool is_concentrated(const std::vector<UStateSample>& samples) {
  return ustate_dispersion(samples) < concentration_threshold;
}

}  // namespace lyap
