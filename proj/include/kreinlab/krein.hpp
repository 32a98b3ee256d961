#pragma once

// Krein-space structure on K = L^2(dp/|p|) + V0 + V.
//
// A vector is a triple (h, alpha, beta):
//   h      momentum profile with h(0) = 0 (the Sigma_0 part),
//   alpha  coefficient of the boundary element v0,
//   beta   coefficient of the null profile chi*.
// All sesquilinear forms are conjugate-linear in the first argument and are
// evaluated relative to a KreinContext that fixes chi*.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kreinlab/profiles.hpp"
#include "kreinlab/quad.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

class KreinContext;

class KreinVector {
 public:
  const MomentumProfile& h() const noexcept { return h_; }
  Complex alpha() const noexcept { return alpha_; }
  Complex beta() const noexcept { return beta_; }
  std::uint64_t context_id() const noexcept { return context_; }

  // Value-at-zero functional: Z(h) = 0, Z(v0) = 0, Z(chi*) = 1.
  Complex value_at_zero() const noexcept { return beta_; }

  friend KreinVector operator+(const KreinVector& a, const KreinVector& b);
  friend KreinVector operator-(const KreinVector& a, const KreinVector& b);
  friend KreinVector operator*(Complex s, const KreinVector& a);

 private:
  friend class KreinContext;
  friend KreinVector eta(const KreinVector& f);
  KreinVector(MomentumProfile h, Complex alpha, Complex beta, std::uint64_t context)
      : h_(std::move(h)), alpha_(alpha), beta_(beta), context_(context) {}

  MomentumProfile h_;
  Complex alpha_{};
  Complex beta_{};
  std::uint64_t context_ = 0;
};

// Exact inner-product table on span{v0, chi*} and the v0-h rule.
struct StructuralGram {
  static constexpr double v0_v0 = 0.0;
  static constexpr double chi_star_chi_star = 0.0;
  static constexpr double v0_chi_star = 1.0;
  static constexpr double chi_star_v0 = 1.0;
  static constexpr double v0_h = 0.0;
};

class KreinContext {
 public:
  // Revalidates chi*: normalized to exactly 1 at p = 0 and null to
  // kNullTolerance under `quad`. Throws ContextInvalid.
  static KreinContext create(const ChiStar& chi_star, const QuadratureConfig& quad);
  // Shorthand: solve for chi* in the given family and wrap it.
  static KreinContext build(ChiStarFamily family, std::array<double, 2> bracket, const QuadratureConfig& quad);

  const ChiStar& chi_star_data() const noexcept { return *chi_star_; }
  const MomentumProfile& chi_star_profile() const noexcept { return chi_star_->profile; }
  double parameter() const noexcept { return chi_star_->parameter; }
  const QuadratureConfig& quadrature() const noexcept { return quad_; }
  std::uint64_t id() const noexcept { return id_; }

  KreinVector zero() const;
  KreinVector v0() const;
  KreinVector chi_star() const;
  // chi = (v0 - chi*) / sqrt(2), held through its coefficients.
  KreinVector chi() const;
  // f -> (f - f(0) chi*, 0, f(0)).
  KreinVector embed(const MomentumProfile& f) const;
  // Assembles a vector from parts; requires h(0) == 0 exactly.
  KreinVector make(const MomentumProfile& h, Complex alpha, Complex beta) const;

  nlohmann::json to_json() const;
  // Rebuilds and revalidates a serialized context. Throws ContextInvalid.
  static KreinContext from_json(const nlohmann::json& j);

 private:
  KreinContext(std::shared_ptr<const ChiStar> chi_star, QuadratureConfig quad, std::uint64_t id)
      : chi_star_(std::move(chi_star)), quad_(quad), id_(id) {}

  std::shared_ptr<const ChiStar> chi_star_;
  QuadratureConfig quad_;
  std::uint64_t id_;
};

// The indefinite form extended to K through the structural table.
Estimate indefinite_inner_k(const KreinVector& f, const KreinVector& g, const KreinContext& ctx);

// (f, g)_K = <h_f, h_g> + <f, chi*><chi*, g> + conj(Z f) Z g
Estimate metric_A(const KreinVector& f, const KreinVector& g, const KreinContext& ctx);

struct CanonicalParts {
  KreinVector plus;
  KreinVector minus;
};

// f+ = f + <chi, f> chi,  f- = -<chi, f> chi. f+ shares f's h-part, so the
// h component reconstructs exactly; alpha and beta carry one rounding each.
CanonicalParts canonical_decompose(const KreinVector& f, const KreinContext& ctx);

// <f+, g+> + <f, chi><chi, g>
Estimate metric_B(const KreinVector& f, const KreinVector& g, const KreinContext& ctx);

// <f, g> + 2 <f, chi><chi, g>
Estimate metric_B_alt(const KreinVector& f, const KreinVector& g, const KreinContext& ctx);

// Fundamental symmetry: swaps the v0 and chi* coefficients. Acts as the
// identity on the L^2 component (a modelling choice: only its action on
// {v0, chi*} is fixed by the structure).
KreinVector eta(const KreinVector& f);

inline constexpr std::string_view kEtaAssumption = "eta acts as the identity on the L2(dp/|p|) component";

// ---- equivalence certification -------------------------------------------------

inline constexpr double kEquivalenceTolerance = 1e-9;

struct PairCheck {
  Complex metric_a;
  Complex metric_b_alt;
  Complex middle;  // <f,g> + [conj(f(0)) - <f,chi*>][g(0) - <chi*,g>]
  double discrepancy;
  double middle_discrepancy;
};

struct EquivalenceReport {
  bool passed = true;
  std::size_t pairs = 0;
  double max_discrepancy = 0.0;
  double max_middle_discrepancy = 0.0;
  std::optional<std::size_t> first_violation;
  std::vector<PairCheck> checks;
  std::string message;
};

// Checks metric_B_alt == metric_A relative to 1 + |metric_A| on every pair.
EquivalenceReport verify_equivalence(std::span<const std::pair<KreinVector, KreinVector>> pairs,
                                     const KreinContext& ctx, double tolerance = kEquivalenceTolerance);

// ---- Gram reports --------------------------------------------------------------

enum class Form { indefinite, metric_A, metric_B };

std::string_view form_name(Form f) noexcept;
Form parse_form(std::string_view name);

inline constexpr double kSignatureZeroBand = 1e-9;
inline constexpr double kHermitianTolerance = 1e-10;

struct GramReport {
  std::string form;
  std::vector<std::string> labels;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  std::array<int, 3> signature{0, 0, 0};  // (negative, zero, positive)

  double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues.minCoeff() : 0.0; }
  nlohmann::json to_json() const;
};

// Builds a report from a matrix of pairwise values. Throws NonHermitian when
// the matrix deviates from Hermitian by more than kHermitianTolerance.
GramReport make_gram_report(std::string form, std::vector<std::string> labels, const Eigen::MatrixXcd& m);

GramReport gram(std::span<const KreinVector> vectors, std::vector<std::string> labels, Form form,
                const KreinContext& ctx);

// Indefinite-form Gram of plain profiles (no context needed).
GramReport gram(std::span<const MomentumProfile> profiles, std::vector<std::string> labels,
                const QuadratureConfig& quad);

}  // namespace kreinlab
