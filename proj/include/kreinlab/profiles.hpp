#pragma once

// Momentum profiles: the restriction of a test function's Fourier transform
// to the forward light cone p0 = |p1|. Everything the massless two-point form
// sees of a test function is carried by one of these.

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kreinlab/types.hpp"

namespace kreinlab {

struct QuadratureConfig;

// Envelope certificate: |h(p)| <= scale * (1 + |p|)^degree * exp(-rate p^2)
// for all p, and h(p) = 0 for |p| > support.
struct DecayBound {
  double scale = 0.0;
  int degree = 0;
  double rate = 0.0;
  double support = std::numeric_limits<double>::infinity();

  double operator()(double p) const noexcept;
  bool compact() const noexcept { return std::isfinite(support); }
};

// Product envelope of two certified profiles.
DecayBound product(const DecayBound& u, const DecayBound& v) noexcept;

enum class Family { zero, gaussian, hermite_gaussian, bump, mass_shell_gaussian, sum };

std::string_view family_name(Family f) noexcept;

class MomentumProfile;

namespace detail {
struct ProfileNode;
}

struct ProfileTerm;

// Immutable, cheap to copy (shared node). Evaluation is thread-safe.
class MomentumProfile {
 public:
  // The zero profile.
  MomentumProfile();

  // amp * exp(-a p^2)
  static MomentumProfile gaussian(double a, Complex amp = 1.0);
  // amp * H_n(sqrt(2a) p) * exp(-a p^2), physicists' Hermite polynomial.
  static MomentumProfile hermite_gaussian(int n, double a, Complex amp = 1.0);
  // amp * exp(1 - 1/(1 - s^2)), s = (p - center)/half_width, zero for |s| >= 1.
  // Normalized so the peak value is amp.
  static MomentumProfile bump(double half_width, double center = 0.0, Complex amp = 1.0);
  // Mass-shell restriction of a Gaussian in spacetime; see SpacetimeGaussian.
  static MomentumProfile mass_shell_gaussian(std::array<double, 2> center, std::array<double, 2> sigma,
                                             Complex amp = 1.0);
  static MomentumProfile sum(std::vector<ProfileTerm> terms);

  Complex operator()(double p) const noexcept;
  Complex at_zero() const noexcept;
  const DecayBound& decay() const noexcept;
  Family family() const noexcept;
  // Real-valued and even, known structurally from the family parameters.
  bool real_symmetric() const noexcept;
  bool is_zero() const noexcept;

  const detail::ProfileNode& node() const noexcept { return *node_; }

 private:
  explicit MomentumProfile(std::shared_ptr<const detail::ProfileNode> node);
  std::shared_ptr<const detail::ProfileNode> node_;
};

struct ProfileTerm {
  Complex coeff;
  MomentumProfile profile;
};

MomentumProfile operator+(const MomentumProfile& a, const MomentumProfile& b);
MomentumProfile operator-(const MomentumProfile& a, const MomentumProfile& b);
MomentumProfile operator*(Complex s, const MomentumProfile& a);

// Sampled check of real_symmetric(): h(p) real and h(p) == h(-p) on a grid.
bool sampled_real_symmetric(const MomentumProfile& h, double half_range = 8.0, int samples = 257,
                            double tol = 0.0);

// A Gaussian in 1+1 spacetime:
//   f(t, x) = amp * exp(-(t - c0)^2 / (2 s0^2) - (x - c1)^2 / (2 s1^2)).
// Fourier convention: F(p0, p1) = Int d^2x exp(i (p0 t - p1 x)) f(t, x), the
// normalization for which the momentum-space form carries exactly 1/(4 pi).
struct SpacetimeGaussian {
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> sigma{1.0, 1.0};
  Complex amp{1.0, 0.0};

  Complex operator()(double t, double x) const noexcept;
  Complex fourier(double p0, double p1) const noexcept;
  Complex integral() const noexcept { return fourier(0.0, 0.0); }
  MomentumProfile mass_shell() const;
};

using SpacetimeCombination = std::vector<SpacetimeGaussian>;

MomentumProfile mass_shell(const SpacetimeCombination& f);
Complex spacetime_integral(const SpacetimeCombination& f) noexcept;

// ---- null real-symmetric profile -------------------------------------------

enum class ChiStarFamily { gaussian, bump };

std::string_view family_name(ChiStarFamily f) noexcept;
ChiStarFamily parse_chi_star_family(std::string_view name);

// Member of a one-parameter real-symmetric family, normalized to 1 at p = 0.
// gaussian: exp(-a p^2); bump: bump(half_width = a).
MomentumProfile chi_star_member(ChiStarFamily family, double parameter);

// Default search bracket for the null parameter.
std::array<double, 2> default_chi_star_bracket(ChiStarFamily family) noexcept;

struct ChiStar {
  ChiStarFamily family = ChiStarFamily::gaussian;
  double parameter = 0.0;
  MomentumProfile profile;
  double residual = 0.0;  // <chi*, chi*> under the construction config
};

inline constexpr double kNullTolerance = 1e-8;

// Finds the family parameter at which the profile is null for the indefinite
// form. Throws NoSignChange / NonConvergence.
ChiStar make_chi_star(ChiStarFamily family, std::array<double, 2> bracket, const QuadratureConfig& quad);

// ---- JSON ------------------------------------------------------------------

nlohmann::json to_json(const MomentumProfile& h);
// Accepts {"family":"gaussian","a":..,"amp":[re,im]}, "hermite-gaussian" (n, a),
// "bump" (width, center), "spacetime-gaussian" (center, sigma) and
// {"family":"sum","terms":[...]} where a term is a profile object optionally
// carrying "coeff":[re,im].
MomentumProfile profile_from_json(const nlohmann::json& j);

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

}  // namespace kreinlab
