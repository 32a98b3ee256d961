#include "kreinlab/wightman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kreinlab/errors.hpp"

namespace kreinlab {

CausalClass SpacetimePoint::causal_class() const noexcept {
  const double s = square();
  if (std::abs(s) <= kLightlikeBand) return CausalClass::lightlike;
  return s > 0.0 ? CausalClass::timelike : CausalClass::spacelike;
}

SpacetimePoint boost(SpacetimePoint p, double rapidity) noexcept {
  const double ch = std::cosh(rapidity);
  const double sh = std::sinh(rapidity);
  return {ch * p.t + sh * p.x, sh * p.t + ch * p.x};
}

Complex w_position(SpacetimePoint x, double eps) {
  if (!(eps > 0.0)) throw PreconditionViolation("w_position: eps must be positive");
  if (x.causal_class() == CausalClass::lightlike && (eps < kTinyEps || x.t == 0.0))
    throw LightlikeBoundary("w_position: point (" + std::to_string(x.t) + ", " + std::to_string(x.x) +
                            ") lies in the light-cone band where the logarithm is ill-conditioned");
  return -kInvFourPi * std::log(Complex(-x.square(), eps * x.t));
}

double d_commutator(SpacetimePoint x) {
  switch (x.causal_class()) {
    case CausalClass::lightlike:
      throw LightlikeBoundary("d_commutator: point (" + std::to_string(x.t) + ", " + std::to_string(x.x) +
                              ") lies on the light cone, where D is distributional");
    case CausalClass::timelike:
      return x.t > 0.0 ? 0.5 : -0.5;
    case CausalClass::spacelike:
      return 0.0;
  }
  return 0.0;
}

std::vector<double> default_eps_ladder() { return {1e-2, 5e-3, 2.5e-3, 1.25e-3}; }

Extrapolation w_position_limit(SpacetimePoint x, std::span<const double> ladder, int order) {
  std::vector<EpsSample> samples;
  samples.reserve(ladder.size());
  for (double eps : ladder) samples.push_back({eps, w_position(x, eps)});
  return eps_extrapolate(samples, order);
}

Complex commutator_residual(SpacetimePoint x, double eps) {
  return w_position(x, eps) - w_position(-x, eps) + Complex(0.0, d_commutator(x));
}

QuadResult indefinite_inner(const MomentumProfile& f, const MomentumProfile& g, const QuadratureConfig& quad) {
  return ir_weighted_integral(f, g, quad);
}

double gaussian_inner_closed_form(double a, double b) noexcept {
  return -(std::numbers::egamma + std::log(a + b)) * kInvFourPi;
}

// ---- position-space route ------------------------------------------------------

namespace {

// One Gaussian term of the cross-correlation C(z) = Int d^2y conj(f(y + z)) g(y).
struct CorrelationTerm {
  Complex coeff;
  std::array<double, 2> shift;
  std::array<double, 2> inv_two_var;
};

std::vector<CorrelationTerm> correlation(const SpacetimeCombination& f, const SpacetimeCombination& g) {
  std::vector<CorrelationTerm> out;
  const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);
  for (const auto& fj : f) {
    for (const auto& gk : g) {
      CorrelationTerm t;
      t.coeff = std::conj(fj.amp) * gk.amp;
      for (int axis = 0; axis < 2; ++axis) {
        const double s2 = fj.sigma[axis] * fj.sigma[axis];
        const double t2 = gk.sigma[axis] * gk.sigma[axis];
        t.coeff *= root_two_pi * fj.sigma[axis] * gk.sigma[axis] / std::sqrt(s2 + t2);
        t.shift[axis] = fj.center[axis] - gk.center[axis];
        t.inv_two_var[axis] = 0.5 / (s2 + t2);
      }
      out.push_back(t);
    }
  }
  return out;
}

void require_zero_mean(const SpacetimeCombination& f, const char* which) {
  double scale = 0.0;
  for (const auto& term : f) scale += std::abs(term.integral());
  if (scale == 0.0) return;
  if (std::abs(spacetime_integral(f)) > 1e-12 * scale)
    throw PreconditionViolation(std::string("position_inner_zero_mean: ") + which +
                                " has nonzero mean (its Fourier transform does not vanish at p = 0)");
}

// Composite Gauss-Legendre rule on [-L, L], graded geometrically toward 0.
void axis_rule(double half_length, double panel, const PositionQuadrature& opts, std::vector<double>& nodes,
               std::vector<double>& weights) {
  std::vector<double> breaks{0.0};
  for (int k = opts.grading_levels; k >= 1; --k) breaks.push_back(std::ldexp(panel, -k));
  double x = panel;
  while (x < half_length) {
    breaks.push_back(x);
    x += panel;
  }
  breaks.push_back(std::max(x, half_length));

  const GaussRule rule = gauss_legendre(opts.nodes_per_panel);
  std::vector<double> pos_nodes, pos_weights;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int q = 0; q < opts.nodes_per_panel; ++q) {
      pos_nodes.push_back(c + h * rule.nodes[q]);
      pos_weights.push_back(h * rule.weights[q]);
    }
  }
  nodes.clear();
  weights.clear();
  for (std::size_t i = pos_nodes.size(); i-- > 0;) {
    nodes.push_back(-pos_nodes[i]);
    weights.push_back(pos_weights[i]);
  }
  nodes.insert(nodes.end(), pos_nodes.begin(), pos_nodes.end());
  weights.insert(weights.end(), pos_weights.begin(), pos_weights.end());
}

}  // namespace

PositionInnerResult position_inner_zero_mean(const SpacetimeCombination& f, const SpacetimeCombination& g,
                                             std::span<const double> ladder_in, const PositionQuadrature& opts) {
  require_zero_mean(f, "f");
  require_zero_mean(g, "g");

  std::vector<double> ladder(ladder_in.begin(), ladder_in.end());
  if (ladder.empty()) ladder = default_eps_ladder();

  PositionInnerResult out;
  const auto terms = correlation(f, g);
  double coeff_scale = 0.0;
  for (const auto& t : terms) coeff_scale = std::max(coeff_scale, std::abs(t.coeff));
  if (coeff_scale == 0.0) {
    for (double eps : ladder) out.samples.push_back({eps, Complex{}});
    return out;
  }

  // Domain and panel size from the correlation widths.
  double reach = 0.0;
  double narrowest = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    double r = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const double width = std::sqrt(0.5 / t.inv_two_var[axis]);
      r += std::abs(t.shift[axis]) + opts.reach * width;
      narrowest = std::min(narrowest, width);
    }
    reach = std::max(reach, r);
  }
  const double panel = std::min(0.5, 0.5 * narrowest);

  // Light-cone coordinates u = z0 - z1, v = z0 + z1; d^2z = du dv / 2 and
  // -z^2 = -u v, so the logarithm's singular set sits on the coordinate axes.
  std::vector<double> nodes, weights;
  axis_rule(reach, panel, opts, nodes, weights);

  const std::size_t n = nodes.size();
  const std::size_t m = ladder.size();
  std::vector<Complex> acc(m, Complex{});
  const double negligible = 1e-18 * coeff_scale;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = nodes[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double v = nodes[j];
      const double z0 = 0.5 * (u + v);
      const double z1 = 0.5 * (v - u);
      Complex c{};
      for (const auto& t : terms) {
        const double d0 = z0 - t.shift[0];
        const double d1 = z1 - t.shift[1];
        c += t.coeff * std::exp(-d0 * d0 * t.inv_two_var[0] - d1 * d1 * t.inv_two_var[1]);
      }
      if (std::abs(c) < negligible) continue;
      const Complex wc = (0.5 * weights[i] * weights[j]) * c;
      const double minus_sq = -u * v;
      for (std::size_t e = 0; e < m; ++e) acc[e] += wc * std::log(Complex(minus_sq, ladder[e] * z0));
    }
  }

  for (std::size_t e = 0; e < m; ++e) out.samples.push_back({ladder[e], -kInvFourPi * acc[e]});
  const Extrapolation ex = eps_extrapolate(out.samples, opts.richardson_order);
  out.value = ex.limit;
  out.uncertainty = ex.uncertainty;
  return out;
}

}  // namespace kreinlab
