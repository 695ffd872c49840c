#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <lyap/exponents.hpp>
#include <lyap/holder.hpp>
#include <lyap/stationary.hpp>

using namespace lyap;

namespace {

constexpr double pi = std::numbers::pi;

FiniteCocycle diagonal_base() { return {{Mat2C::diag(2.0, 0.5), Mat2C::diag(0.5, 2.0)}, {0.7, 0.3}}; }

FiniteCocycle generic_cocycle() {
  return {{Mat2C{Complex(1.2, 0.3), 0.5, Complex(0.1, -0.4), 0.8}, Mat2C{0.6, Complex(0.0, 1.0), 0.7, 1.5}},
          {0.6, 0.4}};
}

FiniteCocycle perturbed_base(double gamma) { return perturb(diagonal_base(), gamma, default_perturbation_directions(2)); }

ParticleMeasure random_measure(std::mt19937_64& g, std::size_t n) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Particle> ps;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ps.push_back({ProjPoint(Complex(nd(g), nd(g)), Complex(nd(g), nd(g))), u(g)});
    total += ps.back().weight;
  }
  for (auto& p : ps) p.weight /= total;
  return ParticleMeasure(std::move(ps));
}

}  // namespace

// Dictionary

TEST(Dictionary, BoundedAndVersioned) {
  EXPECT_EQ(dictionary_version, 1);
  EXPECT_EQ(dictionary_size, 64u);
  std::mt19937_64 g(1);
  const ParticleMeasure m = random_measure(g, 2000);
  for (const auto& p : m.particles())
    for (double f : dictionary_values(p.point)) EXPECT_LE(std::abs(f), 1.0 + 1e-12);
}

TEST(Dictionary, PhaseInvariant) {
  const ProjPoint p(Complex(0.3, 0.2), Complex(-0.7, 0.5));
  const ProjPoint q(std::polar(1.0, 1.3) * p.z1(), std::polar(1.0, 1.3) * p.z2());
  const auto fp = dictionary_values(p), fq = dictionary_values(q);
  for (std::size_t k = 0; k < dictionary_size; ++k) EXPECT_NEAR(fp[k], fq[k], 1e-12);
}

// Transfer operator

TEST(TransferStep, AxisDiracsAreFixed) {
  const FiniteCocycle a = diagonal_base();
  for (const ProjPoint& p : {ProjPoint::horizontal(), ProjPoint::vertical()}) {
    const ParticleMeasure out = transfer_step(a, ParticleMeasure::dirac(p));
    for (const auto& q : out.particles()) EXPECT_EQ(q.point, p);
    EXPECT_NEAR(out.total_mass(), 1.0, 1e-15);
    EXPECT_LE(residual(a, ParticleMeasure::dirac(p)), 1e-12);
  }
}

TEST(TransferStep, RejectsUnnormalized) {
  EXPECT_THROW(transfer_step(diagonal_base(), ParticleMeasure({{ProjPoint::horizontal(), 0.4}})), UnnormalizedMeasure);
  EXPECT_THROW(residual(diagonal_base(), ParticleMeasure({{ProjPoint::horizontal(), 2.0}})), UnnormalizedMeasure);
}

TEST(TransferStep, ResampledBudgetAndDeterminism) {
  const ParticleMeasure eta = ParticleMeasure::uniform_real(500);
  const ParticleMeasure x = transfer_step(generic_cocycle(), eta, 300, 4);
  const ParticleMeasure y = transfer_step(generic_cocycle(), eta, 300, 4);
  EXPECT_EQ(x.size(), 300u);
  EXPECT_NEAR(x.total_mass(), 1.0, 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x.particles()[i].point, y.particles()[i].point);
}

TEST(Resample, PreservesIntegralsApproximately) {
  std::mt19937_64 g(3);
  const ParticleMeasure eta = random_measure(g, 5000);
  const ParticleMeasure r = resample_systematic(eta, 5000, 0.37);
  const auto a = detail::dictionary_integrals(eta), b = detail::dictionary_integrals(r);
  for (std::size_t k = 0; k < dictionary_size; ++k) EXPECT_NEAR(a[k], b[k], 0.02);
  EXPECT_THROW(resample_systematic(eta, 0, 0.5), InvalidParams);
}

TEST(Properties, MassConservation) {
  std::mt19937_64 g(5);
  const std::vector<FiniteCocycle> cocycles{diagonal_base(), generic_cocycle(), kifer_family(2.0, 0.5),
                                            kifer_family(3.0, 0.9)};
  for (const auto& a : cocycles)
    for (int i = 0; i < 20; ++i) {
      const ParticleMeasure eta = random_measure(g, 200);
      EXPECT_NEAR(transfer_step(a, eta).total_mass(), 1.0, 1e-10);
      EXPECT_NEAR(transfer_step(a, eta, 150, i).total_mass(), 1.0, 1e-10);
    }
}

// Residual

TEST(Residual, RotationsFixUniformMeasure) {
  const FiniteCocycle rot({Mat2C::rotation(0.3), Mat2C::rotation(1.1)}, {0.5, 0.5});
  EXPECT_LE(residual(rot, ParticleMeasure::uniform_real(10'000)), 1e-8);
}

TEST(Residual, CesaroAveragesDecreaseOnContractingExample) {
  const FiniteCocycle a = FiniteCocycle::single(Mat2C{2.0, 1.0, 0.0, 0.5});
  std::vector<ParticleMeasure> orbit{ParticleMeasure::uniform_real(200)};
  for (int t = 0; t < 24; ++t) orbit.push_back(transfer_step(a, orbit.back()));
  double previous = 1e300;
  for (std::size_t n = 1; n <= orbit.size(); ++n) {
    std::vector<Particle> avg;
    for (std::size_t t = 0; t < n; ++t)
      for (const auto& p : orbit[t].particles()) avg.push_back({p.point, p.weight / static_cast<double>(n)});
    const double r = residual(a, ParticleMeasure(std::move(avg)));
    EXPECT_LE(r, previous + 1e-12) << "n=" << n;
    previous = r;
  }
}

// Solver

TEST(SolveStationary, AttractingEigendirection) {
  const FiniteCocycle a = FiniteCocycle::single(Mat2C{2.0, 1.0, 0.0, 0.5});
  const StationarySolution s = solve_stationary(a, 1000, 256, 1e-3, 1);
  ASSERT_TRUE(s.converged);
  EXPECT_GE(directional_mass(s.measure, ProjPoint::horizontal(), 1e-3), 0.99);
  EXPECT_LE(s.residual, 1e-2);
  EXPECT_NEAR(s.measure.total_mass(), 1.0, 1e-10);
}

TEST(SolveStationary, DiagonalZeroExponentMassEscapesToAxes) {
  const FiniteCocycle a({Mat2C::diag(2.0, 0.5), Mat2C::diag(0.5, 2.0)}, {0.5, 0.5});
  const StationarySolution s = solve_stationary(a, 10'000, 512, 1e-3, 2);
  const double h = directional_mass(s.measure, ProjPoint::horizontal(), pi / 8);
  const double v = directional_mass(s.measure, ProjPoint::vertical(), pi / 8);
  EXPECT_GE(h + v, 0.85);
  EXPECT_GE(std::min(h, v), 0.3);
}

TEST(SolveStationary, FurstenbergMatchesMc) {
  const FiniteCocycle a = perturbed_base(0.1);
  const StationarySolution s = require_converged(solve_stationary(a, 10'000, 512, 1e-3, 3));
  const ExponentEstimate e = estimate_extremal_mc(a, 100'000, 32, 3);
  EXPECT_LE(std::abs(furstenberg_integral(a, s.measure) - e.lambda_plus), std::max(2.0 * e.stderr_plus, 1e-2));
}

TEST(SolveStationary, Deterministic) {
  const StationarySolution x = solve_stationary(generic_cocycle(), 500, 64, 1e-2, 6);
  const StationarySolution y = solve_stationary(generic_cocycle(), 500, 64, 1e-2, 6);
  ASSERT_EQ(x.measure.size(), y.measure.size());
  for (std::size_t i = 0; i < x.measure.size(); ++i) EXPECT_EQ(x.measure.particles()[i].point, y.measure.particles()[i].point);
  EXPECT_EQ(x.residual, y.residual);
}

TEST(SolveStationary, NotConvergedIsReported) {
  const StationarySolution s = solve_stationary(generic_cocycle(), 200, 2, 1e-12, 1);
  EXPECT_FALSE(s.converged);
  EXPECT_GT(s.measure.size(), 0u);
  EXPECT_THROW(require_converged(s), NotConverged);
  EXPECT_THROW(solve_stationary(generic_cocycle(), 50, 10, 1e-3, 1), InvalidParams);
}

TEST(SolveStationary, DirectionalMassTrend) {
  double previous = 2.0;
  for (double gamma : {0.2, 0.1, 0.05, 0.02}) {
    const StationarySolution s = solve_stationary(perturbed_base(gamma), 10'000, 512, 1e-3, 11);
    const double m = directional_mass(s.measure, ProjPoint::vertical(), pi / 4);
    EXPECT_LT(m, previous) << "gamma=" << gamma;
    previous = m;
  }
}

TEST(Properties, FurstenbergWithinSpectrum) {
  for (const FiniteCocycle& a : {generic_cocycle(), perturbed_base(0.2),
                              FiniteCocycle({Mat2C{2.0, 1.0, 1.0, 1.0}, Mat2C{1.0, 1.0, 0.0, 1.0}}, {0.5, 0.5})}) {
    const StationarySolution s = solve_stationary(a, 5000, 256, 2e-3, 12);
    const ExponentEstimate e = estimate_extremal_mc(a, 50'000, 16, 12);
    const double f = furstenberg_integral(a, s.measure);
    const double tol = 1e-2;
    EXPECT_GE(f, e.lambda_minus - tol);
    EXPECT_LE(f, e.lambda_plus + tol);
  }
}

// Directional mass

TEST(DirectionalMass, Oracles) {
  const ProjPoint d(1.0, Complex(0.2, 0.1));
  EXPECT_EQ(directional_mass(ParticleMeasure::dirac(d), d, 1e-9), 1.0);
  EXPECT_EQ(directional_mass(ParticleMeasure::dirac(orthogonal(d)), d, pi / 2 - 1e-9), 0.0);
}

// u-states

TEST(UState, HyperbolicMatrixConverges) {
  const FiniteCocycle a = FiniteCocycle::single(Mat2C{2.0, 1.0, 0.0, 0.5});
  const auto samples = ustate_backward_sample(a, 40, 50, 1);
  for (const auto& s : samples) {
    EXPECT_LT(angle_between(s.point, ProjPoint::horizontal()), 1e-10);
    EXPECT_EQ(s.depth, 40u);
    EXPECT_EQ(s.past_word.size(), 40u);
  }
  EXPECT_TRUE(is_concentrated(samples));
}

TEST(UState, DiagonalBaseConcentratesHorizontally) {
  const auto samples = ustate_backward_sample(diagonal_base(), 400, 500, 2);
  std::size_t near = 0;
  for (const auto& s : samples) near += angle_between(s.point, ProjPoint::horizontal()) < 1e-3;
  EXPECT_GE(near, 490u);
  EXPECT_TRUE(is_concentrated(samples));
}

TEST(UState, RotationsDoNotConcentrate) {
  const FiniteCocycle rot({Mat2C::rotation(0.3), Mat2C::rotation(1.1)}, {0.5, 0.5});
  const auto samples = ustate_backward_sample(rot, 100, 500, 3);
  EXPECT_EQ(samples.size(), 500u);
  EXPECT_FALSE(is_concentrated(samples));
}

TEST(UState, PointIsImageOfSeedUnderBackwardProduct) {
  const FiniteCocycle a = generic_cocycle();
  for (const auto& s : ustate_backward_sample(a, 15, 20, 4)) {
    ProjPoint v = default_seed_point();
    for (Symbol x : s.past_word) v = proj_apply(a.matrix(x), v);
    EXPECT_LT(angle_between(v, s.point), 1e-12);
  }
  EXPECT_THROW(ustate_backward_sample(a, 0, 5, 1), InvalidParams);
}

TEST(UState, PrefixesSharedAcrossDepths) {
  const FiniteCocycle a = generic_cocycle();
  const auto shallow = ustate_backward_sample(a, 10, 30, 5), deep = ustate_backward_sample(a, 20, 30, 5);
  for (std::size_t i = 0; i < shallow.size(); ++i)
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(shallow[i].past_word[9 - j], deep[i].past_word[19 - j]);
}

TEST(Properties, MartingaleConsistency) {
  const FiniteCocycle a = generic_cocycle();
  const std::size_t n = 4000;
  for (std::size_t depth : {20u, 40u}) {
    const auto x = ustate_backward_sample(a, depth, n, 6), y = ustate_backward_sample(a, 2 * depth, n, 6);
    for (std::size_t k : {0u, 2u, 5u, 20u, 40u}) {
      double mx = 0.0, my = 0.0, vx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mx += dictionary_values(x[i].point)[k];
        my += dictionary_values(y[i].point)[k];
      }
      mx /= n;
      my /= n;
      for (std::size_t i = 0; i < n; ++i) vx += std::pow(dictionary_values(x[i].point)[k] - mx, 2);
      const double se = std::sqrt(vx / (n - 1.0) / n);
      EXPECT_LE(std::abs(mx - my), 4.0 * se + 1e-12) << "depth=" << depth << " f=" << k;
    }
  }
}
