#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <lyap/cocycle.hpp>
#include <lyap/oseledets.hpp>

using namespace lyap;

namespace {

constexpr double pi = std::numbers::pi;

FiniteCocycle diagonal_base() { return {{Mat2C::diag(2.0, 0.5), Mat2C::diag(0.5, 2.0)}, {0.7, 0.3}}; }

FiniteCocycle perturbed_base(double gamma) { return perturb(diagonal_base(), gamma, default_perturbation_directions(2)); }

FiniteCocycle generic_cocycle() {
  return {{Mat2C{Complex(1.2, 0.3), 0.5, Complex(0.1, -0.4), 0.8}, Mat2C{0.6, Complex(0.0, 1.0), 0.7, 1.5}},
          {0.6, 0.4}};
}

const FiniteCocycle upper = FiniteCocycle::single(Mat2C{2.0, 1.0, 0.0, 0.5});

// Backward Birkhoff sum of the horizontal exponent along a past word.
double horizontal_sum(std::span<const Symbol> word) {
  double s = 0.0;
  for (Symbol x : word) s += x == 0 ? 1.0 : -1.0;
  return s;
}

}  // namespace

TEST(Unstable, SingleMatrixEigendirection) {
  const std::vector<Symbol> past(50, 0);
  EXPECT_LT(angle_between(estimate_unstable(upper, past), ProjPoint::horizontal()), 1e-6);
}

TEST(Stable, SingleMatrixEigendirection) {
  const std::vector<Symbol> future(50, 0);
  EXPECT_LT(angle_between(estimate_stable(upper, future), ProjPoint(2.0, -3.0)), 1e-6);
}

TEST(Stable, RotationIsDegenerate) {
  const FiniteCocycle rot = FiniteCocycle::single(Mat2C::rotation(0.4));
  const std::vector<Symbol> word(10, 0);
  EXPECT_THROW(estimate_stable(rot, word), DegenerateGap);
  EXPECT_THROW(estimate_unstable(rot, word), DegenerateGap);
}

TEST(Frames, EmptyWordsRejected) {
  EXPECT_THROW(estimate_unstable(upper, std::vector<Symbol>{}), InvalidParams);
  EXPECT_THROW(estimate_stable(upper, std::vector<Symbol>{}), InvalidParams);
}

TEST(Frames, DiagonalBaseTypicalWords) {
  const FiniteCocycle a = diagonal_base();
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PathSample w = sample_path(a, 100, seed);
    const double s = horizontal_sum(w.symbols);
    if (s == 0.0) continue;
    const ProjPoint expected_u = s > 0 ? ProjPoint::horizontal() : ProjPoint::vertical();
    const ProjPoint expected_s = s > 0 ? ProjPoint::vertical() : ProjPoint::horizontal();
    EXPECT_LT(angle_between(estimate_unstable(a, w.symbols), expected_u), 1e-12);
    EXPECT_LT(angle_between(estimate_stable(a, w.symbols), expected_s), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(Frames, DepthConsistency) {
  const FiniteCocycle a = generic_cocycle();
  const PathSample w = sample_path(a, 200, 3);
  const std::span<const Symbol> all(w.symbols);
  // The most recent symbols sit at the end of a past word.
  const ProjPoint shallow = estimate_unstable(a, all.last(50));
  const ProjPoint deep = estimate_unstable(a, all.last(100));
  const ProjPoint deeper = estimate_unstable(a, all.last(200));
  EXPECT_LT(angle_between(deep, deeper), 1e-8);
  EXPECT_LE(angle_between(deep, deeper), angle_between(shallow, deeper) + 1e-15);
}

TEST(Frames, FrameFields) {
  const std::vector<Symbol> word(40, 0);
  const OseledetsFrame f = estimate_frame(upper, word, word);
  EXPECT_EQ(f.depth, 40u);
  EXPECT_GE(f.gap_estimate, 0.0);
  EXPECT_LT(angle_between(f.unstable, ProjPoint::horizontal()), 1e-6);
}

TEST(Properties, Equivariance) {
  const FiniteCocycle a = generic_cocycle();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PathSample w = sample_path(a, 201, seed);
    const std::span<const Symbol> all(w.symbols);
    const std::span<const Symbol> past = all.first(200);
    const Symbol x0 = all[200];
    const ProjPoint pushed = proj_apply(a.matrix(x0), estimate_unstable(a, past));
    EXPECT_LT(angle_between(pushed, estimate_unstable(a, all)), 1e-6);
  }
}

TEST(Properties, GapEstimateForHyperbolicMatrix) {
  const FiniteCocycle a = FiniteCocycle::single(Mat2C{2.0, 1.0, 1.0, 1.0});
  const double rho = (3.0 + std::sqrt(5.0)) / 2.0;
  for (std::size_t depth : {10u, 100u, 1000u}) {
    const std::vector<Symbol> word(depth, 0);
    EXPECT_NEAR(estimate_frame(a, word, word).gap_estimate, 2.0 * std::log(rho), 1e-12) << depth;
  }
}

TEST(Properties, UnstableAndStableTransverse) {
  const FiniteCocycle a = diagonal_base();
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PathSample past = sample_path(a, 100, seed), future = sample_path(a, 100, seed + 1000);
    if (horizontal_sum(past.symbols) <= 0.0 || horizontal_sum(future.symbols) <= 0.0) continue;
    EXPECT_GE(angle_between(estimate_unstable(a, past.symbols), estimate_stable(a, future.symbols)), 0.1);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(AngleExperiment, IdenticalCocyclesGiveOne) {
  const FiniteCocycle a = perturbed_base(0.1);
  const AngleExperimentResult r = angle_convergence_experiment(a, a, 1e-12, 60, 100, 1);
  EXPECT_EQ(r.fraction, 1.0);
  EXPECT_EQ(r.n_used + r.n_excluded, r.n_points);
}

TEST(AngleExperiment, RightAngleGivesOne) {
  const AngleExperimentResult r =
      angle_convergence_experiment(perturbed_base(0.1), perturbed_base(0.2), pi / 2, 60, 100, 2);
  EXPECT_EQ(r.fraction, 1.0);
}

TEST(AngleExperiment, Validation) {
  EXPECT_THROW(angle_convergence_experiment(diagonal_base(), upper, 0.2, 10, 10, 1), AlphabetMismatch);
  EXPECT_THROW(angle_convergence_experiment(diagonal_base(), diagonal_base(), 0.2, 0, 10, 1), InvalidParams);
}

TEST(AngleExperiment, DegenerateWordsAreExcluded) {
  const FiniteCocycle rot({Mat2C::rotation(0.3), Mat2C::rotation(0.9)}, {0.5, 0.5});
  const AngleExperimentResult r = angle_convergence_experiment(rot, rot, 0.2, 20, 30, 3);
  EXPECT_EQ(r.n_excluded, 30u);
  EXPECT_EQ(r.n_used, 0u);
}

TEST(AngleExperiment, DeterministicAcrossThreads) {
  const FiniteCocycle a = diagonal_base(), b = perturbed_base(0.05);
  set_threads(1);
  const AngleExperimentResult x = angle_convergence_experiment(a, b, 0.2, 100, 300, 4);
  set_threads(3);
  const AngleExperimentResult y = angle_convergence_experiment(a, b, 0.2, 100, 300, 4);
  set_threads(0);
  EXPECT_EQ(x.fraction, y.fraction);
  EXPECT_EQ(x.n_excluded, y.n_excluded);
}

TEST(AngleExperiment, FractionGrowsAsPerturbationShrinks) {
  const FiniteCocycle a = diagonal_base();
  double previous = -1.0;
  for (double gamma : {0.1, 0.05, 0.01}) {
    const AngleExperimentResult r = angle_convergence_experiment(a, perturbed_base(gamma), 0.2, 200, 1000, 5);
    EXPECT_GE(r.fraction, previous) << "gamma=" << gamma;
    previous = r.fraction;
  }
}
