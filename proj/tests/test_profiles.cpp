#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"
#include "kreinlab/profiles.hpp"
#include "kreinlab/quad.hpp"

using namespace kreinlab;

TEST(Profiles, GaussianValues) {
  const auto g = MomentumProfile::gaussian(0.5, Complex(2.0, -1.0));
  EXPECT_EQ(g.at_zero(), Complex(2.0, -1.0));
  EXPECT_NEAR(std::abs(g(2.0) - Complex(2.0, -1.0) * std::exp(-2.0)), 0.0, 1e-15);
  EXPECT_EQ(g.family(), Family::gaussian);
  EXPECT_FALSE(g.real_symmetric());
  EXPECT_TRUE(MomentumProfile::gaussian(0.5).real_symmetric());
  EXPECT_THROW(MomentumProfile::gaussian(0.0), PreconditionViolation);
  EXPECT_THROW(MomentumProfile::gaussian(-1.0), PreconditionViolation);
}

TEST(Profiles, HermiteGaussianUsesPhysicistsPolynomials) {
  const double a = 0.7;
  const auto h2 = MomentumProfile::hermite_gaussian(2, a);
  for (double p : {-1.3, 0.0, 0.4, 2.0}) {
    const double x = std::sqrt(2.0 * a) * p;
    EXPECT_NEAR(h2(p).real(), (4.0 * x * x - 2.0) * std::exp(-a * p * p), 1e-14);
  }
  const auto h1 = MomentumProfile::hermite_gaussian(1, a);
  EXPECT_EQ(h1.at_zero(), Complex(0.0));
  EXPECT_NEAR(h1(0.9).real(), -h1(-0.9).real(), 1e-15);
}

TEST(Profiles, BumpIsCompactAndPeaksAtAmplitude) {
  const auto b = MomentumProfile::bump(2.0, 0.5, 3.0);
  EXPECT_NEAR(b(0.5).real(), 3.0, 1e-15);
  EXPECT_EQ(b(2.5), Complex(0.0));
  EXPECT_EQ(b(-1.6), Complex(0.0));
  EXPECT_GT(b(2.4).real(), 0.0);
  EXPECT_TRUE(b.decay().compact());
  EXPECT_DOUBLE_EQ(b.decay().support, 2.5);
  EXPECT_FALSE(b.real_symmetric());
  EXPECT_TRUE(MomentumProfile::bump(2.0).real_symmetric());
}

TEST(Profiles, DecayEnvelopeDominatesSamples) {
  const std::vector<MomentumProfile> hs{
      MomentumProfile::gaussian(0.3, Complex(1.0, 2.0)),
      MomentumProfile::hermite_gaussian(2, 0.4, -2.0),
      MomentumProfile::bump(1.5, -0.2),
      MomentumProfile::mass_shell_gaussian({0.3, -0.7}, {0.9, 1.2}, Complex(0.0, 1.0)),
      MomentumProfile::gaussian(1.0) - 0.5 * MomentumProfile::bump(3.0) + MomentumProfile::hermite_gaussian(1, 2.0)};
  for (const auto& h : hs) {
    for (double p = -12.0; p <= 12.0; p += 0.01) {
      EXPECT_LE(std::abs(h(p)), h.decay()(p) * (1.0 + 1e-12)) << "p = " << p;
    }
  }
}

TEST(Profiles, SumSubtractionVanishesExactlyAtZero) {
  const auto f = MomentumProfile::gaussian(0.8, Complex(0.3, -1.1)) + MomentumProfile::hermite_gaussian(2, 1.5, 0.7);
  const auto chi = MomentumProfile::gaussian(0.28);
  const auto h = MomentumProfile::sum({{1.0, f}, {-f.at_zero(), chi}});
  EXPECT_EQ(h.at_zero(), Complex(0.0));
  EXPECT_EQ(h(0.0), Complex(0.0));
  EXPECT_NEAR(std::abs(h(0.5) - (f(0.5) - f.at_zero() * chi(0.5))), 0.0, 1e-15);
}

TEST(Profiles, MassShellIsFourierTransformOnTheLightCone) {
  SpacetimeGaussian s;
  s.center = {0.4, -0.3};
  s.sigma = {0.9, 1.3};
  s.amp = Complex(0.5, 0.25);
  const auto h = s.mass_shell();
  for (double p : {-2.0, -0.5, 0.0, 0.7, 1.9}) EXPECT_NEAR(std::abs(h(p) - s.fourier(std::abs(p), p)), 0.0, 1e-14);
  // Direct two-dimensional transform at one point, midpoint rule on a wide box.
  const double p0 = 0.6, p1 = -0.6;
  Complex direct{};
  const double step = 0.02;
  for (double t = -8.0; t < 8.0; t += step)
    for (double x = -8.0; x < 8.0; x += step) {
      const double tm = t + 0.5 * step, xm = x + 0.5 * step;
      direct += std::exp(Complex(0.0, p0 * tm - p1 * xm)) * s(tm, xm);
    }
  direct *= step * step;
  EXPECT_NEAR(std::abs(direct - s.fourier(p0, p1)), 0.0, 1e-8);
}

TEST(Profiles, SampledSymmetryMatchesStructuralFlag) {
  EXPECT_TRUE(sampled_real_symmetric(MomentumProfile::gaussian(0.3)));
  EXPECT_TRUE(sampled_real_symmetric(MomentumProfile::bump(2.0)));
  EXPECT_FALSE(sampled_real_symmetric(MomentumProfile::bump(2.0, 0.1)));
  EXPECT_FALSE(sampled_real_symmetric(MomentumProfile::gaussian(0.3, Complex(1.0, 1e-3))));
}

TEST(Profiles, JsonRoundTrip) {
  const auto f = MomentumProfile::sum({{Complex(1.0, 2.0), MomentumProfile::gaussian(0.4)},
                                       {-1.0, MomentumProfile::hermite_gaussian(2, 0.9, Complex(0.0, 1.0))},
                                       {0.5, MomentumProfile::bump(1.5, 0.25)},
                                       {1.0, MomentumProfile::mass_shell_gaussian({0.1, 0.2}, {1.0, 1.1})}});
  const auto j = to_json(f);
  const auto back = profile_from_json(j);
  EXPECT_EQ(to_json(back), j);
  for (double p : {-3.0, -0.2, 0.0, 0.6, 2.5}) EXPECT_EQ(back(p), f(p));
}

TEST(Profiles, JsonErrors) {
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"a": 1})")), ParseError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"family": "lorentzian", "a": 1})")), ParseError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"family": "gaussian"})")), ParseError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"family": "gaussian", "a": -2})")), ParseError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"family": "hermite-gaussian", "n": 1.5, "a": 1})")),
               ParseError);
  EXPECT_EQ(complex_from_json(nlohmann::json::parse("[1.5, -2]")), Complex(1.5, -2.0));
  EXPECT_EQ(complex_from_json(nlohmann::json::parse("0.25")), Complex(0.25, 0.0));
}

// Reference roots from tests/oracles.py.
TEST(ChiStar, GaussianNullParameter) {
  const QuadratureConfig q{1e-13, 1e-12};
  const ChiStar cs = make_chi_star(ChiStarFamily::gaussian, default_chi_star_bracket(ChiStarFamily::gaussian), q);
  EXPECT_NEAR(cs.parameter, 0.28072974178344258491, 1e-10);
  EXPECT_LE(std::abs(cs.residual), kNullTolerance);
  EXPECT_EQ(cs.profile.at_zero(), Complex(1.0));
  EXPECT_TRUE(cs.profile.real_symmetric());
}

TEST(ChiStar, BumpNullWidth) {
  const QuadratureConfig q{1e-13, 1e-12};
  const ChiStar cs = make_chi_star(ChiStarFamily::bump, default_chi_star_bracket(ChiStarFamily::bump), q);
  EXPECT_NEAR(cs.parameter, 2.2610871358234628846, 1e-9);
  EXPECT_LE(std::abs(cs.residual), kNullTolerance);
}

TEST(ChiStar, BracketWithoutSignChange) {
  EXPECT_THROW(make_chi_star(ChiStarFamily::gaussian, {1.0, 2.0}, {}), NoSignChange);
  EXPECT_THROW(make_chi_star(ChiStarFamily::gaussian, {0.5, 0.1}, {}), PreconditionViolation);
}

TEST(ChiStar, FamilyNames) {
  EXPECT_EQ(parse_chi_star_family("gaussian"), ChiStarFamily::gaussian);
  EXPECT_EQ(parse_chi_star_family("bump"), ChiStarFamily::bump);
  EXPECT_EQ(family_name(ChiStarFamily::bump), "bump");
  EXPECT_THROW(parse_chi_star_family("square"), ParseError);
}
