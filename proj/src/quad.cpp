#include "kreinlab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

namespace kreinlab {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw PreconditionViolation("quadrature tolerances must be strictly positive");
  if (max_intervals < 16) throw PreconditionViolation("quadrature subdivision cap must be at least 16");
  if (!(tail_budget > 0.0 && tail_budget <= 1.0))
    throw PreconditionViolation("quadrature tail budget must lie in (0, 1]");
  if (!(tail_scale >= 1.0)) throw PreconditionViolation("quadrature tail scale must be >= 1");
}

nlohmann::json to_json(const QuadratureConfig& q) {
  return {{"abs_tol", q.abs_tol},
          {"rel_tol", q.rel_tol},
          {"max_intervals", q.max_intervals},
          {"tail_budget", q.tail_budget},
          {"tail_scale", q.tail_scale}};
}

QuadratureConfig quadrature_from_json(const nlohmann::json& j, QuadratureConfig q) {
  try {
    if (j.contains("abs_tol")) q.abs_tol = j.at("abs_tol").get<double>();
    if (j.contains("rel_tol")) q.rel_tol = j.at("rel_tol").get<double>();
    if (j.contains("max_intervals")) q.max_intervals = j.at("max_intervals").get<int>();
    if (j.contains("tail_budget")) q.tail_budget = j.at("tail_budget").get<double>();
    if (j.contains("tail_scale")) q.tail_scale = j.at("tail_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad quadrature config: ") + e.what());
  }
  q.validate();
  return q;
}

namespace {

// Gauss-Kronrod 7/15 (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Complex value;
  double error;
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = f(center);
  Complex kron = fc * kWgk[7];
  Complex gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Complex f1 = f(center - dx);
    const Complex f2 = f(center + dx);
    kron += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, kron * half, std::abs((kron - gauss) * half)};
}

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

constexpr double kTaylorRadius = 1e-8;

}  // namespace

double tail_bound(const DecayBound& env, double cutoff) {
  if (env.scale == 0.0 || cutoff >= env.support) return 0.0;
  const double prefactor = 2.0 * kInvFourPi * env.scale;
  if (env.rate > 0.0) {
    // phi(p) = degree ln(1 + p) - rate p^2 has phi' <= -r on [T, inf).
    const double r = 2.0 * env.rate * cutoff - env.degree / (1.0 + cutoff);
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    const double phi = env.degree * std::log1p(cutoff) - env.rate * cutoff * cutoff;
    return prefactor * std::exp(phi) / (cutoff * r);
  }
  if (env.compact()) return prefactor * std::pow(1.0 + env.support, env.degree) * std::log(env.support / cutoff);
  return std::numeric_limits<double>::infinity();
}

double tail_cutoff(const DecayBound& env, double budget) {
  if (env.scale == 0.0) return 1.0;
  if (env.compact()) return std::max(1.0, env.support);
  if (!(env.rate > 0.0)) throw PreconditionViolation("tail_cutoff: envelope has no decay certificate");
  double lo = 1.0;
  if (tail_bound(env, lo) <= budget) return lo;
  double hi = 2.0;
  while (tail_bound(env, hi) > budget) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw PreconditionViolation("tail_cutoff: envelope decays too slowly");
  }
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_bound(env, mid) > budget ? lo : hi) = mid;
  }
  return hi;
}

QuadResult ir_weighted_integral(const MomentumProfile& u, const MomentumProfile& v, const QuadratureConfig& quad) {
  quad.validate();
  QuadResult out;
  if (u.is_zero() || v.is_zero()) {
    out.cutoff = 1.0;
    return out;
  }

  const Complex s0 = conj_mul(u.at_zero(), v.at_zero());
  auto integrand = [&](double p) -> Complex {
    const double ap = std::abs(p);
    if (ap >= 1.0 || s0 == 0.0) return conj_mul(u(p), v(p)) / ap;
    if (ap < kTaylorRadius) {
      // First-order fallback: the one-sided difference quotient at the
      // Taylor radius approximates the integrand's limit at p -> 0.
      const double q = std::copysign(kTaylorRadius, p);
      return (conj_mul(u(q), v(q)) - s0) / kTaylorRadius;
    }
    return (conj_mul(u(p), v(p)) - s0) / ap;
  };

  const DecayBound env = product(u.decay(), v.decay());
  // Work in unscaled units; the 1/(4 pi) prefactor is applied at the end.
  const double scaled_abs = quad.abs_tol / kInvFourPi;
  const double cutoff = tail_cutoff(env, quad.tail_budget * quad.abs_tol) * quad.tail_scale;
  const double tail = tail_bound(env, cutoff) / kInvFourPi;
  out.cutoff = cutoff;

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  std::vector<std::array<double, 2>> initial = {{-1.0, 0.0}, {0.0, 1.0}};
  if (cutoff > 1.0) {
    initial.insert(initial.begin(), {-cutoff, -1.0});
    initial.push_back({1.0, cutoff});
  }
  for (const auto& [a, b] : initial) heap.push(gk15(integrand, a, b));

  auto totals = [&heap]() {
    // Summation order independent of heap layout: sort by left endpoint.
    std::vector<Panel> panels;
    auto copy = heap;
    while (!copy.empty()) {
      panels.push_back(copy.top());
      copy.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    Complex value{0.0, 0.0};
    double error = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
    }
    return std::pair{value, error};
  };

  Complex value{0.0, 0.0};
  double error = 0.0;
  {
    auto [v0, e0] = totals();
    value = v0;
    error = e0 + tail;
  }
  // Running error total for the loop test; exact totals recomputed at exit.
  double running = error;
  while (running > std::max(scaled_abs, quad.rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= quad.max_intervals) {
      auto [vf, ef] = totals();
      throw ToleranceNotMet(vf * kInvFourPi, (ef + tail) * kInvFourPi,
                            std::max(quad.abs_tol, quad.rel_tol * std::abs(vf) * kInvFourPi));
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      auto [vf, ef] = totals();
      throw ToleranceNotMet(vf * kInvFourPi, (ef + worst.error + tail) * kInvFourPi,
                            std::max(quad.abs_tol, quad.rel_tol * std::abs(vf) * kInvFourPi));
    }
    const Panel left = gk15(integrand, worst.a, mid);
    const Panel right = gk15(integrand, mid, worst.b);
    value += left.value + right.value - worst.value;
    running += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    // Refresh to avoid drift in the running sums.
    if (heap.size() % 64 == 0) {
      auto [vr, er] = totals();
      value = vr;
      running = er + tail;
    }
  }

  auto [vf, ef] = totals();
  out.value = vf * kInvFourPi;
  out.error = (ef + tail) * kInvFourPi;
  out.intervals = static_cast<int>(heap.size());
  return out;
}

// ---- extrapolation -----------------------------------------------------------

Extrapolation eps_extrapolate(std::span<const EpsSample> samples, int order) {
  const std::size_t n = samples.size();
  if (n < 3) throw InsufficientSamples("eps_extrapolate: need at least 3 samples, got " + std::to_string(n));
  for (const auto& s : samples)
    if (!(s.eps > 0.0)) throw PreconditionViolation("eps_extrapolate: eps values must be positive");
  const double r = samples[1].eps / samples[0].eps;
  if (!(r < 1.0)) throw PreconditionViolation("eps_extrapolate: eps must decrease");
  for (std::size_t k = 2; k < n; ++k) {
    const double rk = samples[k].eps / samples[k - 1].eps;
    if (std::abs(rk - r) > 1e-9 * r) throw PreconditionViolation("eps_extrapolate: eps ratios must be constant");
  }

  const int max_order = static_cast<int>(n) - 1;
  const int m = (order <= 0 || order > max_order) ? max_order : order;

  // Neville-style table; row k holds estimates ending at sample k.
  std::vector<std::vector<Complex>> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k].assign(static_cast<std::size_t>(m) + 1, Complex{});
    t[k][0] = samples[k].value;
  }
  for (int j = 1; j <= m; ++j) {
    const double rj = std::pow(r, j);
    for (std::size_t k = static_cast<std::size_t>(j); k < n; ++k)
      t[k][j] = (t[k][j - 1] - rj * t[k - 1][j - 1]) / (1.0 - rj);
  }
  const auto& last = t[n - 1];
  return {last[m], std::abs(last[m] - last[m - 1])};
}

// ---- Gauss-Legendre ----------------------------------------------------------

GaussRule gauss_legendre(int n) {
  if (n < 1) throw PreconditionViolation("gauss_legendre: need at least one node");
  GaussRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace kreinlab
