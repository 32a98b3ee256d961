#pragma once

// Weighted adaptive quadrature for the infrared-subtracted dp/|p| form, plus
// the small numerical toolkit the rest of the library leans on: bracketed
// root finding, Richardson extrapolation and Gauss-Legendre rules.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kreinlab/errors.hpp"
#include "kreinlab/profiles.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_intervals = 4000;
  // Fraction of the absolute tolerance granted to the truncated tail.
  double tail_budget = 0.1;
  // Multiplier on the certificate-derived cutoff (>= 1).
  double tail_scale = 1.0;

  void validate() const;
};

nlohmann::json to_json(const QuadratureConfig& q);
QuadratureConfig quadrature_from_json(const nlohmann::json& j, QuadratureConfig base = {});

struct QuadResult {
  Complex value{};
  double error = 0.0;  // includes the certified tail bound
  int intervals = 0;
  double cutoff = 0.0;

  Estimate estimate() const { return {value, error}; }
};

// (1/4pi) Int dp/|p| [conj(u(p)) v(p) - conj(u(0)) v(0) theta(1 - |p|)]
// Throws ToleranceNotMet when the subdivision cap is reached first.
QuadResult ir_weighted_integral(const MomentumProfile& u, const MomentumProfile& v, const QuadratureConfig& quad);

// Smallest cutoff T >= 1 whose certified two-sided tail (including the 1/4pi
// prefactor) is <= budget. Compactly supported envelopes return their support.
double tail_cutoff(const DecayBound& envelope, double budget);

// Upper bound on (1/4pi) * 2 * Int_T^inf envelope(p) dp / p.
double tail_bound(const DecayBound& envelope, double cutoff);

// ---- root finding ------------------------------------------------------------

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Brent's method on [lo, hi]. Stops when |f(x)| <= tol.
template <class F>
RootResult bracket_root(F&& f, double lo, double hi, double tol, int max_iter = 200);

// ---- extrapolation -----------------------------------------------------------

struct EpsSample {
  double eps;
  Complex value;
};

struct Extrapolation {
  Complex limit{};
  double uncertainty = 0.0;
};

// Richardson extrapolation to eps -> 0 for a geometric eps ladder, assuming an
// error expansion in integer powers of eps. `order` is the number of powers
// eliminated; order <= 0 uses the full table (samples - 1).
Extrapolation eps_extrapolate(std::span<const EpsSample> samples, int order = 1);

// ---- Gauss-Legendre ----------------------------------------------------------

struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// n-point rule on [-1, 1].
GaussRule gauss_legendre(int n);

// ---- implementation ----------------------------------------------------------

template <class F>
RootResult bracket_root(F&& f, double lo, double hi, double tol, int max_iter) {
  if (!(tol > 0.0)) throw PreconditionViolation("bracket_root: tolerance must be positive");
  if (!(lo < hi)) throw PreconditionViolation("bracket_root: empty bracket");

  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (std::abs(fa) <= tol) return {a, fa, 0};
  if (std::abs(fb) <= tol) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) throw NoSignChange(lo, hi, fa, fb);

  double c = a, fc = fa;
  double d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 1e-300;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= tol) return {b, fb, iter};
    if (std::abs(xm) <= tol1) {
      // Bracket has collapsed onto adjacent doubles without meeting tol.
      throw NonConvergence("bracket_root: bracket collapsed with |f| = " + std::to_string(std::abs(fb)) +
                           " > tol");
    }

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  throw NonConvergence("bracket_root: no convergence after " + std::to_string(max_iter) + " iterations");
}

}  // namespace kreinlab
