#include "kreinlab/krein.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

std::atomic<std::uint64_t> next_context_id{1};

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void same_context(std::uint64_t a, std::uint64_t b) {
  if (a != b) throw ContextMismatch();
}

void same_context(const KreinVector& f, const KreinVector& g, const KreinContext& ctx) {
  same_context(f.context_id(), ctx.id());
  same_context(g.context_id(), ctx.id());
}

MomentumProfile add_h(const MomentumProfile& a, Complex sa, const MomentumProfile& b, Complex sb) {
  if (b.is_zero() || sb == 0.0) return (sa == 1.0 || a.is_zero()) ? a : sa * a;
  if (a.is_zero() || sa == 0.0) return sb == 1.0 ? b : sb * b;
  return MomentumProfile::sum({{sa, a}, {sb, b}});
}

Estimate quad_inner(const MomentumProfile& u, const MomentumProfile& v, const QuadratureConfig& q) {
  if (u.is_zero() || v.is_zero()) return {};
  return ir_weighted_integral(u, v, q).estimate();
}

Estimate coeff_term(Complex left, Complex right, double table_entry) {
  return {conj_mul(left, right) * table_entry, 0.0};
}

}  // namespace

// ---- KreinVector arithmetic ------------------------------------------------------

KreinVector operator+(const KreinVector& a, const KreinVector& b) {
  same_context(a.context_, b.context_);
  return {add_h(a.h_, 1.0, b.h_, 1.0), a.alpha_ + b.alpha_, a.beta_ + b.beta_, a.context_};
}

KreinVector operator-(const KreinVector& a, const KreinVector& b) {
  same_context(a.context_, b.context_);
  return {add_h(a.h_, 1.0, b.h_, -1.0), a.alpha_ - b.alpha_, a.beta_ - b.beta_, a.context_};
}

KreinVector operator*(Complex s, const KreinVector& a) {
  MomentumProfile h = (a.h_.is_zero() || s == 1.0) ? a.h_ : (s == 0.0 ? MomentumProfile() : s * a.h_);
  return {std::move(h), s * a.alpha_, s * a.beta_, a.context_};
}

KreinVector eta(const KreinVector& f) { return {f.h_, f.beta_, f.alpha_, f.context_}; }

// ---- KreinContext ----------------------------------------------------------------

KreinContext KreinContext::create(const ChiStar& cs, const QuadratureConfig& quad) {
  quad.validate();
  if (cs.profile.at_zero() != Complex(1.0, 0.0))
    throw ContextInvalid("chi* must equal exactly 1 at p = 0");
  if (!cs.profile.real_symmetric()) throw ContextInvalid("chi* must be real and even");
  const double residual = ir_weighted_integral(cs.profile, cs.profile, quad).value.real();
  if (!(std::abs(residual) <= kNullTolerance))
    throw ContextInvalid("chi* is not null: <chi*, chi*> = " + std::to_string(residual));
  auto stored = std::make_shared<ChiStar>(cs);
  stored->residual = residual;
  return KreinContext(std::move(stored), quad, next_context_id.fetch_add(1));
}

KreinContext KreinContext::build(ChiStarFamily family, std::array<double, 2> bracket, const QuadratureConfig& quad) {
  return create(make_chi_star(family, bracket, quad), quad);
}

KreinVector KreinContext::zero() const { return {MomentumProfile(), 0.0, 0.0, id_}; }
KreinVector KreinContext::v0() const { return {MomentumProfile(), 1.0, 0.0, id_}; }
KreinVector KreinContext::chi_star() const { return {MomentumProfile(), 0.0, 1.0, id_}; }
KreinVector KreinContext::chi() const { return {MomentumProfile(), kInvSqrt2, -kInvSqrt2, id_}; }

KreinVector KreinContext::embed(const MomentumProfile& f) const {
  const Complex f0 = f.at_zero();
  if (f0 == 0.0) return {f, 0.0, 0.0, id_};
  MomentumProfile h = MomentumProfile::sum({{1.0, f}, {-f0, chi_star_->profile}});
  return {std::move(h), 0.0, f0, id_};
}

KreinVector KreinContext::make(const MomentumProfile& h, Complex alpha, Complex beta) const {
  if (h.at_zero() != 0.0) throw PreconditionViolation("Krein vector h-part must vanish at p = 0");
  return {h, alpha, beta, id_};
}

nlohmann::json KreinContext::to_json() const {
  return {{"schema", "1"},
          {"family", std::string(family_name(chi_star_->family))},
          {"parameter", chi_star_->parameter},
          {"residual", chi_star_->residual},
          {"chi_star", kreinlab::to_json(chi_star_->profile)},
          {"quadrature", kreinlab::to_json(quad_)}};
}

KreinContext KreinContext::from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ContextInvalid("context must be a JSON object");
    if (j.value("schema", std::string()) != "1") throw ContextInvalid("unsupported context schema");
    ChiStar cs;
    cs.family = parse_chi_star_family(j.at("family").get<std::string>());
    cs.parameter = j.at("parameter").get<double>();
    cs.residual = j.at("residual").get<double>();
    if (!(cs.parameter > 0.0)) throw ContextInvalid("context parameter must be positive");
    cs.profile = chi_star_member(cs.family, cs.parameter);
    if (j.contains("chi_star") && j.at("chi_star") != kreinlab::to_json(cs.profile))
      throw ContextInvalid("stored chi* profile does not match its family and parameter");
    if (!(std::abs(cs.residual) <= kNullTolerance))
      throw ContextInvalid("stored chi* residual " + std::to_string(cs.residual) + " exceeds null tolerance");
    const QuadratureConfig quad =
        j.contains("quadrature") ? quadrature_from_json(j.at("quadrature")) : QuadratureConfig{};
    return create(cs, quad);
  } catch (const nlohmann::json::exception& e) {
    throw ContextInvalid(std::string("malformed context: ") + e.what());
  } catch (const ParseError& e) {
    throw ContextInvalid(std::string("malformed context: ") + e.what());
  } catch (const PreconditionViolation& e) {
    throw ContextInvalid(std::string("malformed context: ") + e.what());
  }
}

// ---- forms -----------------------------------------------------------------------

Estimate indefinite_inner_k(const KreinVector& f, const KreinVector& g, const KreinContext& ctx) {
  same_context(f, g, ctx);
  const auto& q = ctx.quadrature();
  const auto& chi = ctx.chi_star_profile();

  const Estimate hh = quad_inner(f.h(), g.h(), q);
  // chi*-h cross terms; h-v0 terms vanish by the structural table.
  const Estimate cross_h = Estimate{conj_mul(f.beta(), 1.0), 0.0} * quad_inner(chi, g.h(), q) +
                           quad_inner(f.h(), chi, q) * Estimate{g.beta(), 0.0};
  const Estimate cross_basis = coeff_term(f.alpha(), g.beta(), StructuralGram::v0_chi_star) +
                               coeff_term(f.beta(), g.alpha(), StructuralGram::chi_star_v0);
  const Estimate diag_basis = coeff_term(f.alpha(), g.alpha(), StructuralGram::v0_v0) +
                              coeff_term(f.beta(), g.beta(), StructuralGram::chi_star_chi_star);
  return hh + cross_h + cross_basis + diag_basis;
}

Estimate metric_A(const KreinVector& f, const KreinVector& g, const KreinContext& ctx) {
  same_context(f, g, ctx);
  const KreinVector chi_star = ctx.chi_star();
  const Estimate hh = quad_inner(f.h(), g.h(), ctx.quadrature());
  const Estimate f_chi = indefinite_inner_k(f, chi_star, ctx);
  const Estimate chi_g = indefinite_inner_k(chi_star, g, ctx);
  const Estimate zz{conj_mul(f.value_at_zero(), g.value_at_zero()), 0.0};
  return hh + f_chi * chi_g + zz;
}

CanonicalParts canonical_decompose(const KreinVector& f, const KreinContext& ctx) {
  same_context(f.context_id(), ctx.id());
  const KreinVector chi = ctx.chi();
  const double chi_norm = indefinite_inner_k(chi, chi, ctx).value.real();
  if (std::abs(chi_norm + 1.0) > kNullTolerance)
    throw ContextInvalid("<chi, chi> = " + std::to_string(chi_norm) + ", expected -1");
  const Complex c = indefinite_inner_k(chi, f, ctx).value;
  return {f + c * chi, (-c) * chi};
}

Estimate metric_B(const KreinVector& f, const KreinVector& g, const KreinContext& ctx) {
  same_context(f, g, ctx);
  const KreinVector chi = ctx.chi();
  const CanonicalParts fp = canonical_decompose(f, ctx);
  const CanonicalParts gp = canonical_decompose(g, ctx);
  return indefinite_inner_k(fp.plus, gp.plus, ctx) +
         indefinite_inner_k(f, chi, ctx) * indefinite_inner_k(chi, g, ctx);
}

Estimate metric_B_alt(const KreinVector& f, const KreinVector& g, const KreinContext& ctx) {
  same_context(f, g, ctx);
  const KreinVector chi = ctx.chi();
  return indefinite_inner_k(f, g, ctx) +
         Complex(2.0) * (indefinite_inner_k(f, chi, ctx) * indefinite_inner_k(chi, g, ctx));
}

// ---- equivalence -----------------------------------------------------------------

EquivalenceReport verify_equivalence(std::span<const std::pair<KreinVector, KreinVector>> pairs,
                                     const KreinContext& ctx, double tolerance) {
  EquivalenceReport report;
  const KreinVector chi_star = ctx.chi_star();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [f, g] = pairs[i];
    PairCheck c;
    c.metric_a = metric_A(f, g, ctx).value;
    c.metric_b_alt = metric_B_alt(f, g, ctx).value;
    const Complex left = std::conj(f.value_at_zero()) - indefinite_inner_k(f, chi_star, ctx).value;
    const Complex right = g.value_at_zero() - indefinite_inner_k(chi_star, g, ctx).value;
    c.middle = indefinite_inner_k(f, g, ctx).value + left * right;
    const double scale = 1.0 + std::abs(c.metric_a);
    c.discrepancy = std::abs(c.metric_b_alt - c.metric_a) / scale;
    c.middle_discrepancy = std::max(std::abs(c.middle - c.metric_b_alt), std::abs(c.middle - c.metric_a)) / scale;
    report.max_discrepancy = std::max(report.max_discrepancy, c.discrepancy);
    report.max_middle_discrepancy = std::max(report.max_middle_discrepancy, c.middle_discrepancy);
    if (!report.first_violation && (c.discrepancy > tolerance || c.middle_discrepancy > tolerance)) {
      report.first_violation = i;
      report.passed = false;
      report.message = "pair " + std::to_string(i) + " violates the equivalence: relative discrepancy " +
                       std::to_string(std::max(c.discrepancy, c.middle_discrepancy));
    }
    report.checks.push_back(c);
  }
  report.pairs = pairs.size();
  if (report.passed) report.message = "all pairs agree within tolerance";
  return report;
}

// ---- Gram reports ----------------------------------------------------------------

std::string_view form_name(Form f) noexcept {
  switch (f) {
    case Form::indefinite:
      return "indefinite";
    case Form::metric_A:
      return "metric_A";
    case Form::metric_B:
      return "metric_B";
  }
  return "unknown";
}

Form parse_form(std::string_view name) {
  if (name == "indefinite") return Form::indefinite;
  if (name == "metric_A") return Form::metric_A;
  if (name == "metric_B") return Form::metric_B;
  throw ParseError("unknown form '" + std::string(name) + "' (expected indefinite, metric_A or metric_B)");
}

GramReport make_gram_report(std::string form, std::vector<std::string> labels, const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw PreconditionViolation("Gram matrix must be square and non-empty");
  if (labels.size() != static_cast<std::size_t>(m.rows()))
    throw PreconditionViolation("Gram labels must match the matrix size");
  const Eigen::MatrixXcd adj = m.adjoint();
  const double deviation = (m - adj).cwiseAbs().maxCoeff();
  if (deviation > kHermitianTolerance) throw NonHermitian(deviation);

  GramReport r;
  r.form = std::move(form);
  r.labels = std::move(labels);
  r.matrix = 0.5 * (m + adj);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r.matrix, Eigen::EigenvaluesOnly);
  r.eigenvalues = solver.eigenvalues();
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    const double e = r.eigenvalues[i];
    if (e < -kSignatureZeroBand)
      ++r.signature[0];
    else if (e > kSignatureZeroBand)
      ++r.signature[2];
    else
      ++r.signature[1];
  }
  return r;
}

nlohmann::json GramReport::to_json() const {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) row.push_back(complex_to_json(matrix(i, j)));
    rows.push_back(std::move(row));
  }
  auto eigs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) eigs.push_back(eigenvalues[i]);
  return {{"schema", "1"},
          {"form", form},
          {"labels", labels},
          {"matrix", std::move(rows)},
          {"eigs", std::move(eigs)},
          {"signature", {signature[0], signature[1], signature[2]}}};
}

GramReport gram(std::span<const KreinVector> vectors, std::vector<std::string> labels, Form form,
                const KreinContext& ctx) {
  if (vectors.empty()) throw PreconditionViolation("gram: need at least one vector");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& f = vectors[static_cast<std::size_t>(i)];
      const auto& g = vectors[static_cast<std::size_t>(j)];
      switch (form) {
        case Form::indefinite:
          m(i, j) = indefinite_inner_k(f, g, ctx).value;
          break;
        case Form::metric_A:
          m(i, j) = metric_A(f, g, ctx).value;
          break;
        case Form::metric_B:
          m(i, j) = metric_B(f, g, ctx).value;
          break;
      }
    }
  }
  return make_gram_report(std::string(form_name(form)), std::move(labels), m);
}

GramReport gram(std::span<const MomentumProfile> profiles, std::vector<std::string> labels,
                const QuadratureConfig& quad) {
  if (profiles.empty()) throw PreconditionViolation("gram: need at least one profile");
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = ir_weighted_integral(profiles[static_cast<std::size_t>(i)], profiles[static_cast<std::size_t>(j)],
                                     quad)
                    .value;
  return make_gram_report("indefinite", std::move(labels), m);
}

}  // namespace kreinlab
