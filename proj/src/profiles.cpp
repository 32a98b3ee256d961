#include "kreinlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "kreinlab/errors.hpp"
#include "kreinlab/quad.hpp"

namespace kreinlab {

namespace detail {

struct ProfileNode {
  Family family = Family::zero;
  double a = 0.0;       // gaussian / hermite rate
  int n = 0;            // hermite degree
  double width = 0.0;   // bump half-width
  double center = 0.0;  // bump center
  std::array<double, 2> st_center{0.0, 0.0};
  std::array<double, 2> st_sigma{0.0, 0.0};
  Complex amp{0.0, 0.0};
  std::vector<ProfileTerm> terms;

  Complex h0{};
  DecayBound decay{0.0, 0, 0.0, 0.0};
  bool symmetric = true;

  Complex eval(double p) const noexcept;
};

namespace {

double hermite(int n, double y) noexcept {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * y;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * y * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Sum of |coefficients| of H_n, so that |H_n(y)| <= S (1 + |y|)^n.
double hermite_abs_coeff_sum(int n) {
  std::vector<double> prev{1.0};
  if (n == 0) return 1.0;
  std::vector<double> cur{0.0, 2.0};
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += 2.0 * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] += 2.0 * k * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  double s = 0.0;
  for (double c : cur) s += c;
  return s;
}

bool is_real(Complex z) noexcept { return z.imag() == 0.0; }

}  // namespace

Complex ProfileNode::eval(double p) const noexcept {
  switch (family) {
    case Family::zero:
      return {0.0, 0.0};
    case Family::gaussian:
      return amp * std::exp(-a * p * p);
    case Family::hermite_gaussian:
      return amp * (hermite(n, std::sqrt(2.0 * a) * p) * std::exp(-a * p * p));
    case Family::bump: {
      const double s = (p - center) / width;
      if (std::abs(s) >= 1.0) return {0.0, 0.0};
      return amp * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    case Family::mass_shell_gaussian: {
      const double s2 = st_sigma[0] * st_sigma[0] + st_sigma[1] * st_sigma[1];
      const double mag = 2.0 * std::numbers::pi * st_sigma[0] * st_sigma[1] * std::exp(-0.5 * s2 * p * p);
      const double phase = std::abs(p) * st_center[0] - p * st_center[1];
      return amp * std::polar(mag, phase);
    }
    case Family::sum: {
      Complex acc{0.0, 0.0};
      for (const auto& t : terms) acc += t.coeff * t.profile(p);
      return acc;
    }
  }
  return {0.0, 0.0};
}

}  // namespace detail

using detail::ProfileNode;
using detail::is_real;

// ---- DecayBound ------------------------------------------------------------

double DecayBound::operator()(double p) const noexcept {
  const double ap = std::abs(p);
  if (ap > support || scale == 0.0) return 0.0;
  return scale * std::pow(1.0 + ap, degree) * std::exp(-rate * p * p);
}

DecayBound product(const DecayBound& u, const DecayBound& v) noexcept {
  return {u.scale * v.scale, u.degree + v.degree, u.rate + v.rate, std::min(u.support, v.support)};
}

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::zero:
      return "zero";
    case Family::gaussian:
      return "gaussian";
    case Family::hermite_gaussian:
      return "hermite-gaussian";
    case Family::bump:
      return "bump";
    case Family::mass_shell_gaussian:
      return "spacetime-gaussian";
    case Family::sum:
      return "sum";
  }
  return "unknown";
}

// ---- MomentumProfile -------------------------------------------------------

namespace {

std::shared_ptr<ProfileNode> finish(std::shared_ptr<ProfileNode> node) {
  node->h0 = node->eval(0.0);
  return node;
}

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionViolation(what);
}

}  // namespace

MomentumProfile::MomentumProfile() : MomentumProfile(std::make_shared<const ProfileNode>()) {}

MomentumProfile::MomentumProfile(std::shared_ptr<const ProfileNode> node) : node_(std::move(node)) {}

MomentumProfile MomentumProfile::gaussian(double a, Complex amp) {
  require(a > 0.0 && std::isfinite(a), "gaussian: rate must be positive and finite");
  auto n = std::make_shared<ProfileNode>();
  n->family = Family::gaussian;
  n->a = a;
  n->amp = amp;
  n->decay = {std::abs(amp), 0, a, std::numeric_limits<double>::infinity()};
  n->symmetric = is_real(amp);
  return MomentumProfile(finish(std::move(n)));
}

MomentumProfile MomentumProfile::hermite_gaussian(int degree, double a, Complex amp) {
  require(a > 0.0 && std::isfinite(a), "hermite-gaussian: rate must be positive and finite");
  require(degree >= 0 && degree <= 40, "hermite-gaussian: degree must lie in [0, 40]");
  auto n = std::make_shared<ProfileNode>();
  n->family = Family::hermite_gaussian;
  n->a = a;
  n->n = degree;
  n->amp = amp;
  const double stretch = std::pow(std::max(1.0, std::sqrt(2.0 * a)), degree);
  n->decay = {std::abs(amp) * detail::hermite_abs_coeff_sum(degree) * stretch, degree, a,
              std::numeric_limits<double>::infinity()};
  n->symmetric = is_real(amp) && degree % 2 == 0;
  return MomentumProfile(finish(std::move(n)));
}

MomentumProfile MomentumProfile::bump(double half_width, double center, Complex amp) {
  require(half_width > 0.0 && std::isfinite(half_width), "bump: half-width must be positive and finite");
  require(std::isfinite(center), "bump: center must be finite");
  auto n = std::make_shared<ProfileNode>();
  n->family = Family::bump;
  n->width = half_width;
  n->center = center;
  n->amp = amp;
  n->decay = {std::abs(amp), 0, 0.0, std::abs(center) + half_width};
  n->symmetric = is_real(amp) && center == 0.0;
  return MomentumProfile(finish(std::move(n)));
}

MomentumProfile MomentumProfile::mass_shell_gaussian(std::array<double, 2> center, std::array<double, 2> sigma,
                                                     Complex amp) {
  require(sigma[0] > 0.0 && sigma[1] > 0.0, "spacetime-gaussian: widths must be positive");
  auto n = std::make_shared<ProfileNode>();
  n->family = Family::mass_shell_gaussian;
  n->st_center = center;
  n->st_sigma = sigma;
  n->amp = amp;
  n->decay = {std::abs(amp) * 2.0 * std::numbers::pi * sigma[0] * sigma[1], 0,
              0.5 * (sigma[0] * sigma[0] + sigma[1] * sigma[1]), std::numeric_limits<double>::infinity()};
  n->symmetric = is_real(amp) && center[0] == 0.0 && center[1] == 0.0;
  return MomentumProfile(finish(std::move(n)));
}

MomentumProfile MomentumProfile::sum(std::vector<ProfileTerm> terms) {
  if (terms.empty()) return MomentumProfile();
  auto n = std::make_shared<ProfileNode>();
  n->family = Family::sum;

  // Envelope: the slowest Gaussian rate among non-compact terms governs;
  // compact terms are folded in by inflating their scale over their support.
  double rate = std::numeric_limits<double>::infinity();
  bool any_noncompact = false;
  int degree = 0;
  double support = 0.0;
  for (const auto& t : terms) {
    const auto& d = t.profile.decay();
    if (t.coeff == 0.0 || d.scale == 0.0) continue;
    degree = std::max(degree, d.degree);
    support = std::max(support, d.support);
    if (!d.compact()) {
      any_noncompact = true;
      rate = std::min(rate, d.rate);
    }
  }
  if (!any_noncompact) {
    rate = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
      const auto& d = t.profile.decay();
      if (t.coeff == 0.0 || d.scale == 0.0) continue;
      rate = std::min(rate, d.rate);
    }
    if (!std::isfinite(rate)) rate = 0.0;
  }
  double scale = 0.0;
  for (const auto& t : terms) {
    const auto& d = t.profile.decay();
    if (t.coeff == 0.0 || d.scale == 0.0) continue;
    double s = std::abs(t.coeff) * d.scale;
    if (d.compact() && rate > d.rate) s *= std::exp((rate - d.rate) * d.support * d.support);
    scale += s;
  }
  n->decay = {scale, degree, rate, scale == 0.0 ? 0.0 : support};

  bool symmetric = true;
  for (const auto& t : terms) symmetric = symmetric && is_real(t.coeff) && t.profile.real_symmetric();
  n->symmetric = symmetric;
  n->terms = std::move(terms);
  return MomentumProfile(finish(std::move(n)));
}

Complex MomentumProfile::operator()(double p) const noexcept {
  if (p == 0.0) return node_->h0;
  return node_->eval(p);
}

Complex MomentumProfile::at_zero() const noexcept { return node_->h0; }
const DecayBound& MomentumProfile::decay() const noexcept { return node_->decay; }
Family MomentumProfile::family() const noexcept { return node_->family; }
bool MomentumProfile::real_symmetric() const noexcept { return node_->symmetric; }
bool MomentumProfile::is_zero() const noexcept { return node_->decay.scale == 0.0; }

MomentumProfile operator+(const MomentumProfile& a, const MomentumProfile& b) {
  return MomentumProfile::sum({{1.0, a}, {1.0, b}});
}

MomentumProfile operator-(const MomentumProfile& a, const MomentumProfile& b) {
  return MomentumProfile::sum({{1.0, a}, {-1.0, b}});
}

MomentumProfile operator*(Complex s, const MomentumProfile& a) { return MomentumProfile::sum({{s, a}}); }

bool sampled_real_symmetric(const MomentumProfile& h, double half_range, int samples, double tol) {
  for (int i = 0; i < samples; ++i) {
    const double p = half_range * static_cast<double>(i) / std::max(1, samples - 1);
    const Complex plus = h(p);
    const Complex minus = h(-p);
    const double scale = std::max(1.0, std::abs(plus));
    if (std::abs(plus.imag()) > tol * scale || std::abs(minus.imag()) > tol * scale) return false;
    if (std::abs(plus - minus) > tol * scale) return false;
  }
  return true;
}

// ---- SpacetimeGaussian -----------------------------------------------------

Complex SpacetimeGaussian::operator()(double t, double x) const noexcept {
  const double dt = (t - center[0]) / sigma[0];
  const double dx = (x - center[1]) / sigma[1];
  return amp * std::exp(-0.5 * (dt * dt + dx * dx));
}

Complex SpacetimeGaussian::fourier(double p0, double p1) const noexcept {
  const double mag = 2.0 * std::numbers::pi * sigma[0] * sigma[1] *
                     std::exp(-0.5 * (sigma[0] * sigma[0] * p0 * p0 + sigma[1] * sigma[1] * p1 * p1));
  return amp * std::polar(mag, p0 * center[0] - p1 * center[1]);
}

MomentumProfile SpacetimeGaussian::mass_shell() const {
  return MomentumProfile::mass_shell_gaussian(center, sigma, amp);
}

MomentumProfile mass_shell(const SpacetimeCombination& f) {
  std::vector<ProfileTerm> terms;
  terms.reserve(f.size());
  for (const auto& g : f) terms.push_back({1.0, g.mass_shell()});
  return MomentumProfile::sum(std::move(terms));
}

Complex spacetime_integral(const SpacetimeCombination& f) noexcept {
  Complex acc{0.0, 0.0};
  for (const auto& g : f) acc += g.integral();
  return acc;
}

// ---- chi* ------------------------------------------------------------------

std::string_view family_name(ChiStarFamily f) noexcept {
  return f == ChiStarFamily::gaussian ? "gaussian" : "bump";
}

ChiStarFamily parse_chi_star_family(std::string_view name) {
  if (name == "gaussian") return ChiStarFamily::gaussian;
  if (name == "bump") return ChiStarFamily::bump;
  throw ParseError("unknown chi* family '" + std::string(name) + "' (expected gaussian or bump)");
}

MomentumProfile chi_star_member(ChiStarFamily family, double parameter) {
  return family == ChiStarFamily::gaussian ? MomentumProfile::gaussian(parameter)
                                           : MomentumProfile::bump(parameter);
}

std::array<double, 2> default_chi_star_bracket(ChiStarFamily family) noexcept {
  if (family == ChiStarFamily::gaussian) return {0.1, 1.0};
  return {0.5, 20.0};
}

ChiStar make_chi_star(ChiStarFamily family, std::array<double, 2> bracket, const QuadratureConfig& quad) {
  quad.validate();
  if (!(bracket[0] > 0.0 && bracket[0] < bracket[1]))
    throw PreconditionViolation("make_chi_star: bracket must satisfy 0 < lo < hi");

  auto self_product = [&](double parameter) {
    const auto h = chi_star_member(family, parameter);
    return ir_weighted_integral(h, h, quad).value.real();
  };
  // Root tolerance well inside the null tolerance so the post-check is robust
  // to re-evaluation under a different subdivision.
  const RootResult r = bracket_root(self_product, bracket[0], bracket[1], 1e-12);

  ChiStar out;
  out.family = family;
  out.parameter = r.root;
  out.profile = chi_star_member(family, r.root);
  out.residual = ir_weighted_integral(out.profile, out.profile, quad).value.real();
  if (std::abs(out.residual) > kNullTolerance)
    throw NonConvergence("make_chi_star: residual " + std::to_string(out.residual) + " exceeds null tolerance");
  if (out.profile.at_zero() != Complex(1.0, 0.0))
    throw NonConvergence("make_chi_star: profile not normalized at p = 0");
  return out;
}

// ---- JSON ------------------------------------------------------------------

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError("expected a complex number as [re, im] or a real number, got " + j.dump());
}

nlohmann::json to_json(const MomentumProfile& h) {
  const ProfileNode& n = h.node();
  nlohmann::json j;
  j["family"] = std::string(family_name(n.family));
  switch (n.family) {
    case Family::zero:
      break;
    case Family::gaussian:
      j["a"] = n.a;
      j["amp"] = complex_to_json(n.amp);
      break;
    case Family::hermite_gaussian:
      j["n"] = n.n;
      j["a"] = n.a;
      j["amp"] = complex_to_json(n.amp);
      break;
    case Family::bump:
      j["width"] = n.width;
      j["center"] = n.center;
      j["amp"] = complex_to_json(n.amp);
      break;
    case Family::mass_shell_gaussian:
      j["center"] = {n.st_center[0], n.st_center[1]};
      j["sigma"] = {n.st_sigma[0], n.st_sigma[1]};
      j["amp"] = complex_to_json(n.amp);
      break;
    case Family::sum: {
      auto terms = nlohmann::json::array();
      for (const auto& t : n.terms) {
        auto tj = to_json(t.profile);
        tj["coeff"] = complex_to_json(t.coeff);
        terms.push_back(std::move(tj));
      }
      j["terms"] = std::move(terms);
      break;
    }
  }
  return j;
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("profile field '") + key + "' missing or not a number in " + j.dump());
  return j[key].get<double>();
}

std::array<double, 2> pair_field(const nlohmann::json& j, const char* key, std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(std::string("profile field '") + key + "' must be a pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

MomentumProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw ParseError("profile must be an object with a string 'family': " + j.dump());
  const std::string fam = j["family"].get<std::string>();
  const Complex amp = j.contains("amp") ? complex_from_json(j["amp"]) : Complex(1.0, 0.0);
  try {
    if (fam == "zero") return MomentumProfile();
    if (fam == "gaussian") return MomentumProfile::gaussian(number_field(j, "a"), amp);
    if (fam == "hermite-gaussian") {
      if (!j.contains("n") || !j["n"].is_number_integer()) throw ParseError("hermite-gaussian needs integer 'n'");
      return MomentumProfile::hermite_gaussian(j["n"].get<int>(), number_field(j, "a"), amp);
    }
    if (fam == "bump") {
      const double center = j.contains("center") ? number_field(j, "center") : 0.0;
      return MomentumProfile::bump(number_field(j, "width"), center, amp);
    }
    if (fam == "spacetime-gaussian")
      return MomentumProfile::mass_shell_gaussian(pair_field(j, "center", {0.0, 0.0}),
                                                  pair_field(j, "sigma", {1.0, 1.0}), amp);
    if (fam == "sum") {
      if (!j.contains("terms") || !j["terms"].is_array()) throw ParseError("sum profile needs a 'terms' array");
      std::vector<ProfileTerm> terms;
      for (const auto& tj : j["terms"]) {
        const Complex c = tj.contains("coeff") ? complex_from_json(tj["coeff"]) : Complex(1.0, 0.0);
        terms.push_back({c, profile_from_json(tj)});
      }
      return MomentumProfile::sum(std::move(terms));
    }
  } catch (const PreconditionViolation& e) {
    throw ParseError(std::string("invalid profile parameters: ") + e.what());
  }
  throw ParseError("unknown profile family '" + fam + "'");
}

}  // namespace kreinlab
