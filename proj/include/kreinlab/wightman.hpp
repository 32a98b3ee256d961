#pragma once

// Two-point structure of the free massless scalar field in 1+1 dimensions:
// the Wightman function W, the commutator function D, and the indefinite
// inner product they induce on test functions.

#include <span>
#include <vector>

#include "kreinlab/profiles.hpp"
#include "kreinlab/quad.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

enum class CausalClass { timelike, spacelike, lightlike };

inline constexpr double kLightlikeBand = 1e-12;
// Below this eps the logarithm's branch is ill-conditioned near the light cone.
inline constexpr double kTinyEps = 1e-10;

struct SpacetimePoint {
  double t = 0.0;  // x^0
  double x = 0.0;  // x^1

  // Minkowski square (x^0)^2 - (x^1)^2.
  double square() const noexcept { return t * t - x * x; }
  CausalClass causal_class() const noexcept;
  SpacetimePoint operator-() const noexcept { return {-t, -x}; }
};

// Lorentz boost with rapidity y.
SpacetimePoint boost(SpacetimePoint p, double rapidity) noexcept;

// W(x) = -(1/4pi) log(-x^2 + i eps x^0), principal branch.
Complex w_position(SpacetimePoint x, double eps);

// 1/2 sign(x^0) theta(x^2).
double d_commutator(SpacetimePoint x);

std::vector<double> default_eps_ladder();

// Richardson limit eps -> 0 of w_position over a geometric ladder.
Extrapolation w_position_limit(SpacetimePoint x, std::span<const double> ladder, int order = 0);

// W(x) - W(-x) + i D(x) at fixed eps.
Complex commutator_residual(SpacetimePoint x, double eps);

// The indefinite inner product <f, g> in its momentum-space form.
QuadResult indefinite_inner(const MomentumProfile& f, const MomentumProfile& g, const QuadratureConfig& quad);

// Closed-form <g_a, g_b> for Gaussian profiles exp(-a p^2), exp(-b p^2).
double gaussian_inner_closed_form(double a, double b) noexcept;

// ---- position-space route ------------------------------------------------------

struct PositionQuadrature {
  int nodes_per_panel = 12;
  // Geometric grading toward the light-cone axes stops at 2^-grading_levels.
  int grading_levels = 44;
  // Domain half-width in units of the widest correlation width.
  double reach = 9.0;
  // Richardson order used on the eps ladder.
  int richardson_order = 1;
};

struct PositionInnerResult {
  Complex value{};
  double uncertainty = 0.0;
  std::vector<EpsSample> samples;
};

// Int d^2x d^2y conj(f(x)) W(x - y) g(y) for zero-mean Gaussian combinations,
// computed at each eps on the ladder and extrapolated to eps -> 0.
PositionInnerResult position_inner_zero_mean(const SpacetimeCombination& f, const SpacetimeCombination& g,
                                             std::span<const double> ladder = {},
                                             const PositionQuadrature& opts = {});

}  // namespace kreinlab
