#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kreinlab/errors.hpp"
#include "kreinlab/quad.hpp"

using namespace kreinlab;

namespace {

const QuadratureConfig kTight{1e-13, 1e-12};

Complex inner(const MomentumProfile& u, const MomentumProfile& v, const QuadratureConfig& q = kTight) {
  return ir_weighted_integral(u, v, q).value;
}

MomentumProfile random_combination(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), width(0.2, 3.0);
  std::vector<ProfileTerm> terms;
  terms.push_back({Complex(unit(rng), unit(rng)), MomentumProfile::gaussian(width(rng))});
  terms.push_back({Complex(unit(rng), unit(rng)), MomentumProfile::hermite_gaussian(2, width(rng))});
  terms.push_back({Complex(unit(rng), unit(rng)), MomentumProfile::bump(1.0 + width(rng), 0.3 * unit(rng))});
  return MomentumProfile::sum(std::move(terms));
}

}  // namespace

// Reference values from tests/oracles.py (direct mpmath quadrature).
TEST(IrWeightedIntegral, GaussianReferenceValues) {
  const std::vector<std::pair<double, double>> cases{{0.05, 0.13730053657027994003},
                                                     {0.1404, 0.055138986680625023961},
                                                     {0.2807, 8.4312452714874876538e-6},
                                                     {1.0, -0.10109226318773989354},
                                                     {5.0, -0.22916726286943393041},
                                                     {10.0, -0.28432616290759682876}};
  for (auto [a, want] : cases) {
    const auto g = MomentumProfile::gaussian(a);
    const QuadResult r = ir_weighted_integral(g, g, kTight);
    EXPECT_NEAR(r.value.real(), want, 2e-12) << "a = " << a;
    EXPECT_EQ(r.value.imag(), 0.0);
    EXPECT_LE(std::abs(r.value.real() - want), r.error + 1e-15) << "error estimate too small at a = " << a;
  }
}

TEST(IrWeightedIntegral, MixedReferenceValues) {
  EXPECT_NEAR(inner(MomentumProfile::gaussian(0.05), MomentumProfile::gaussian(5.0)).real(), -0.17480018500161178035,
              2e-12);
  const auto h2 = MomentumProfile::hermite_gaussian(2, 1.0);
  EXPECT_NEAR(inner(h2, h2).real(), -0.40436905275095957416, 2e-12);
  EXPECT_NEAR(inner(h2, MomentumProfile::gaussian(0.5)).real(), 0.58081168408424564473, 2e-12);
  const auto b = MomentumProfile::bump(1.0);
  EXPECT_NEAR(inner(b, b).real(), -0.12984588091689905224, 2e-12);
  const Complex z = inner(MomentumProfile::gaussian(1.0), MomentumProfile::gaussian(2.0, Complex(1.0, 0.5)));
  EXPECT_NEAR(z.real(), -0.13335815129109193969, 2e-12);
  EXPECT_NEAR(z.imag(), -0.066679075645545969845, 2e-12);
}

TEST(IrWeightedIntegral, OddTimesEvenVanishes) {
  const auto h1 = MomentumProfile::hermite_gaussian(1, 1.0);
  EXPECT_NEAR(std::abs(inner(h1, MomentumProfile::gaussian(1.0))), 0.0, 1e-14);
}

TEST(IrWeightedIntegral, ExactlyHermitian) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_combination(rng);
    const auto v = random_combination(rng);
    EXPECT_EQ(inner(u, v), std::conj(inner(v, u)));
    EXPECT_EQ(inner(u, u).imag(), 0.0);
  }
}

TEST(IrWeightedIntegral, Sesquilinear) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_combination(rng), v = random_combination(rng), w = random_combination(rng);
    const Complex a(unit(rng), unit(rng)), b(unit(rng), unit(rng));
    const Complex lhs_right = inner(u, a * v + b * w);
    const Complex rhs_right = a * inner(u, v) + b * inner(u, w);
    EXPECT_NEAR(std::abs(lhs_right - rhs_right), 0.0, 1e-10);
    const Complex lhs_left = inner(a * v + b * w, u);
    const Complex rhs_left = std::conj(a) * inner(v, u) + std::conj(b) * inner(w, u);
    EXPECT_NEAR(std::abs(lhs_left - rhs_left), 0.0, 1e-10);
  }
}

TEST(IrWeightedIntegral, IndependentOfTailCutoff) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 5; ++i) {
    const auto u = random_combination(rng), v = random_combination(rng);
    QuadratureConfig wide = kTight;
    wide.tail_scale = 3.0;
    const QuadResult a = ir_weighted_integral(u, v, kTight);
    const QuadResult b = ir_weighted_integral(u, v, wide);
    EXPECT_GT(b.cutoff, a.cutoff);
    EXPECT_NEAR(std::abs(a.value - b.value), 0.0, 1e-12);
  }
}

TEST(IrWeightedIntegral, ZeroProfileShortCircuits) {
  const QuadResult r = ir_weighted_integral(MomentumProfile(), MomentumProfile::gaussian(1.0), kTight);
  EXPECT_EQ(r.value, Complex(0.0));
  EXPECT_EQ(r.error, 0.0);
}

TEST(IrWeightedIntegral, UnattainableToleranceReportsBestEstimate) {
  QuadratureConfig q{1e-17, 1e-17};
  q.max_intervals = 16;
  const auto g = MomentumProfile::gaussian(0.3);
  try {
    ir_weighted_integral(g, g, q);
    FAIL() << "expected ToleranceNotMet";
  } catch (const ToleranceNotMet& e) {
    EXPECT_GT(e.achieved, e.requested);
    EXPECT_NEAR(e.best.real(), -(std::numbers::egamma + std::log(0.6)) / (4.0 * std::numbers::pi), 1e-6);
  }
}

TEST(IrWeightedIntegral, RejectsBadConfig) {
  const auto g = MomentumProfile::gaussian(1.0);
  EXPECT_THROW(ir_weighted_integral(g, g, {0.0, 1e-9}), PreconditionViolation);
  QuadratureConfig q;
  q.tail_scale = 0.5;
  EXPECT_THROW(ir_weighted_integral(g, g, q), PreconditionViolation);
}

TEST(TailCutoff, MeetsBudget) {
  const DecayBound env{2.0, 3, 0.05};
  for (double budget : {1e-6, 1e-10, 1e-14}) {
    const double t = tail_cutoff(env, budget);
    EXPECT_LE(tail_bound(env, t), budget);
    EXPECT_GT(tail_bound(env, 0.9 * t), budget * 0.5);
  }
  DecayBound compact{1.0, 0, 0.0, 3.5};
  EXPECT_DOUBLE_EQ(tail_cutoff(compact, 1e-12), 3.5);
}

TEST(BracketRoot, FindsRootsToResidualTolerance) {
  const RootResult r = bracket_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14);
  EXPECT_NEAR(r.root, 0.73908513321516064166, 1e-13);
  EXPECT_LE(std::abs(r.residual), 1e-14);
  const RootResult cube = bracket_root([](double x) { return x * x * x - 2.0; }, -4.0, 5.0, 1e-13);
  EXPECT_NEAR(cube.root, std::cbrt(2.0), 1e-13);
}

TEST(BracketRoot, Errors) {
  EXPECT_THROW(bracket_root([](double x) { return x * x + 1.0; }, -1.0, 2.0, 1e-12), NoSignChange);
  EXPECT_THROW(bracket_root([](double x) { return x; }, 1.0, -1.0, 1e-12), PreconditionViolation);
  // A jump has no point with |f| <= tol.
  EXPECT_THROW(bracket_root([](double x) { return x < 0.3 ? -1.0 : 1.0; }, 0.0, 1.0, 1e-12), NonConvergence);
}

TEST(EpsExtrapolate, ExactOnPolynomials) {
  std::vector<EpsSample> s;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) s.push_back({eps, Complex(2.0 - 3.0 * eps + 5.0 * eps * eps, eps)});
  const Extrapolation full = eps_extrapolate(s, 0);
  EXPECT_NEAR(std::abs(full.limit - Complex(2.0, 0.0)), 0.0, 1e-13);
  const Extrapolation first = eps_extrapolate(s, 1);
  EXPECT_NEAR(std::abs(first.limit - Complex(2.0, 0.0)), 5.0 * 0.0125 * 0.025, 1e-12);
}

TEST(EpsExtrapolate, Errors) {
  const std::vector<EpsSample> two{{0.1, 1.0}, {0.05, 1.0}};
  EXPECT_THROW(eps_extrapolate(two), InsufficientSamples);
  const std::vector<EpsSample> rising{{0.1, 1.0}, {0.2, 1.0}, {0.4, 1.0}};
  EXPECT_THROW(eps_extrapolate(rising), PreconditionViolation);
  const std::vector<EpsSample> uneven{{0.1, 1.0}, {0.05, 1.0}, {0.01, 1.0}};
  EXPECT_THROW(eps_extrapolate(uneven), PreconditionViolation);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 12, 20}) {
    const GaussRule r = gauss_legendre(n);
    EXPECT_NEAR(r.weights.sum(), 2.0, 1e-14);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      const double want = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      const double got = (r.weights.array() * r.nodes.array().pow(k)).sum();
      EXPECT_NEAR(got, want, 1e-13) << "n = " << n << ", k = " << k;
    }
  }
}
