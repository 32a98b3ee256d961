#include "kreinlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

constexpr double kGaussianNullOracle = 0.5 * 0.56145948356688516982;  // exp(-gamma) / 2

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Complex random_complex(Rng& rng) { return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}; }

double rel_diff(Complex x, Complex ref) { return std::abs(x - ref) / (1.0 + std::abs(ref)); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

// Runs one criterion body, turning library errors into a failed result.
CriterionResult run_criterion(int id, std::string name, double threshold, double limit_s,
                              const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.threshold = threshold;
  r.runtime_limit_s = limit_s;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const ToleranceNotMet& e) {
    r.passed = false;
    r.measured = e.achieved;
    r.detail = e.what();
  } catch (const Error& e) {
    r.passed = false;
    r.detail = e.what();
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && r.runtime_s >= limit_s) {
    r.passed = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("runtime limit exceeded");
  }
  return r;
}

CriterionResult unavailable(int id, std::string name, double threshold, const std::string& why) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.threshold = threshold;
  r.detail = "no valid Krein context: " + why;
  return r;
}

std::vector<std::pair<KreinVector, KreinVector>> equivalence_sample(const SuiteConfig& cfg, const KreinContext& ctx) {
  Rng rng = criterion_rng(cfg.seed, 3);
  const KreinVector v0 = ctx.v0(), cs = ctx.chi_star(), chi = ctx.chi();
  std::vector<std::pair<KreinVector, KreinVector>> pairs{{v0, v0}, {cs, cs}, {v0, cs}, {cs, v0}, {chi, chi}};
  pairs.emplace_back(v0, random_vector(rng, ctx));
  pairs.emplace_back(random_vector(rng, ctx), cs);
  while (static_cast<int>(pairs.size()) < cfg.equivalence_pairs) {
    KreinVector f = random_vector(rng, ctx);
    KreinVector g = random_vector(rng, ctx);
    pairs.emplace_back(std::move(f), std::move(g));
  }
  pairs.resize(static_cast<std::size_t>(std::max(cfg.equivalence_pairs, 0)), {v0, v0});
  return pairs;
}

bool same_h(const KreinVector& a, const KreinVector& b) {
  return (a.h().is_zero() && b.h().is_zero()) || &a.h().node() == &b.h().node();
}

bool same_components(const KreinVector& a, const KreinVector& b) {
  return same_h(a, b) && a.alpha() == b.alpha() && a.beta() == b.beta();
}

// Largest coefficient deviation in units of the binary64 spacing at the
// original coefficient.
double coefficient_ulps(const KreinVector& got, const KreinVector& want) {
  double worst = 0.0;
  auto one = [&](double g, double w) {
    if (g == w) return;
    const double spacing = std::nextafter(std::abs(w), HUGE_VAL) - std::abs(w);
    worst = std::max(worst, std::abs(g - w) / spacing);
  };
  one(got.alpha().real(), want.alpha().real());
  one(got.alpha().imag(), want.alpha().imag());
  one(got.beta().real(), want.beta().real());
  one(got.beta().imag(), want.beta().imag());
  return worst;
}

}  // namespace

Rng criterion_rng(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

MomentumProfile random_profile(Rng& rng) {
  const int terms = uniform_int(rng, 1, 3);
  std::vector<ProfileTerm> parts;
  for (int i = 0; i < terms; ++i) {
    const Complex amp = random_complex(rng);
    switch (uniform_int(rng, 0, 3)) {
      case 0:
      case 1:
        parts.push_back({amp, MomentumProfile::gaussian(uniform(rng, 0.1, 4.0))});
        break;
      case 2:
        parts.push_back({amp, MomentumProfile::hermite_gaussian(uniform_int(rng, 1, 2), uniform(rng, 0.2, 2.0))});
        break;
      default: {
        const std::array<double, 2> c{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
        const std::array<double, 2> s{uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 1.5)};
        parts.push_back({amp, MomentumProfile::mass_shell_gaussian(c, s, 0.2)});
        break;
      }
    }
  }
  return MomentumProfile::sum(std::move(parts));
}

KreinVector random_vector(Rng& rng, const KreinContext& ctx) {
  KreinVector f = ctx.embed(random_profile(rng));
  if (uniform_int(rng, 0, 1) == 1) f = f + random_complex(rng) * ctx.v0();
  return f;
}

KreinVector random_structural_vector(Rng& rng, const KreinContext& ctx) {
  const Complex a = random_complex(rng);
  const Complex b = random_complex(rng);
  return ctx.make(MomentumProfile(), a, b);
}

SpacetimeCombination random_zero_mean_combination(Rng& rng) {
  SpacetimeGaussian a, b;
  a.center = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
  a.sigma = {uniform(rng, 0.8, 1.4), uniform(rng, 0.8, 1.4)};
  a.amp = random_complex(rng);
  b.center = {uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
  b.sigma = {uniform(rng, 0.8, 1.4), uniform(rng, 0.8, 1.4)};
  // Equal and opposite integrals.
  b.amp = -a.amp * (a.sigma[0] * a.sigma[1]) / (b.sigma[0] * b.sigma[1]);
  return {a, b};
}

SuiteConfig suite_config_from_json(const nlohmann::json& j, SuiteConfig c) {
  try {
    if (!j.is_object()) throw ParseError("verify config must be a JSON object");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("family")) c.family = parse_chi_star_family(j.at("family").get<std::string>());
    if (j.contains("bracket")) c.bracket = j.at("bracket").get<std::array<double, 2>>();
    if (j.contains("quadrature")) c.quad = quadrature_from_json(j.at("quadrature"), c.quad);
    auto count = [&](const char* key, int& field) {
      if (j.contains(key)) field = j.at(key).get<int>();
      if (field < 0) throw ParseError(std::string(key) + " must be non-negative");
    };
    count("equivalence_pairs", c.equivalence_pairs);
    count("gram_vectors", c.gram_vectors);
    count("decomposition_vectors", c.decomposition_vectors);
    count("eta_vectors", c.eta_vectors);
    count("cross_check_pairs", c.cross_check_pairs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad verify config: ") + e.what());
  }
  return c;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport report;
  report.seed = cfg.seed;
  auto& out = report.criteria;

  // 1. chi* construction against exp(-gamma)/2.
  std::optional<ChiStar> built;
  out.push_back(run_criterion(1, "chi* null parameter", 1e-6, 5.0, [&](CriterionResult& r) {
    const auto bracket = cfg.bracket.value_or(default_chi_star_bracket(ChiStarFamily::gaussian));
    built = make_chi_star(ChiStarFamily::gaussian, bracket, cfg.quad);
    const double rel = std::abs(built->parameter - kGaussianNullOracle) / kGaussianNullOracle;
    r.measured = rel;
    r.passed = rel <= 1e-6 && std::abs(built->residual) <= kNullTolerance;
    r.detail = "a* = " + fmt("%.15f", built->parameter) + ", oracle " + fmt("%.15f", kGaussianNullOracle) +
               ", residual " + sci(built->residual) + " (limit 1e-08)";
  }));

  std::optional<KreinContext> ctx;
  std::string ctx_error;
  try {
    if (cfg.context) {
      ctx = KreinContext::from_json(*cfg.context);
    } else if (built && cfg.family == ChiStarFamily::gaussian) {
      ctx = KreinContext::create(*built, cfg.quad);
    } else {
      ctx = KreinContext::build(cfg.family, cfg.bracket.value_or(default_chi_star_bracket(cfg.family)), cfg.quad);
    }
  } catch (const Error& e) {
    ctx_error = e.what();
  }

  // 6 does not need a context; keep numeric order in the output anyway.
  auto needs_ctx = [&](int id, const char* name, double threshold, double limit,
                       const std::function<void(CriterionResult&, const KreinContext&)>& body) {
    if (!ctx) return unavailable(id, name, threshold, ctx_error);
    return run_criterion(id, name, threshold, limit, [&](CriterionResult& r) { body(r, *ctx); });
  };

  // 2. <chi, chi> = -1.
  out.push_back(needs_ctx(2, "<chi, chi> = -1", 1e-8, 0.0, [&](CriterionResult& r, const KreinContext& k) {
    const KreinVector chi = k.chi();
    const Complex structural = indefinite_inner_k(chi, chi, k).value;
    // Same value with the quadrature residual of <chi*, chi*> folded in:
    // <chi, chi> = (<v0,v0> - 2 Re<v0,chi*> + <chi*,chi*>) / 2.
    const double with_residual = 0.5 * (0.0 - 2.0 + k.chi_star_data().residual);
    r.measured = std::max(std::abs(structural + 1.0), std::abs(with_residual + 1.0));
    r.passed = r.measured <= 1e-8;
    r.detail = "structural " + fmt("%.17g", structural.real()) + ", with quadrature residual " +
               fmt("%.17g", with_residual);
  }));

  // 3 and 4 share one sample.
  std::optional<EquivalenceReport> equivalence;
  out.push_back(needs_ctx(3, "metric_B_alt == metric_A", kEquivalenceTolerance, 60.0,
                          [&](CriterionResult& r, const KreinContext& k) {
                            const auto pairs = equivalence_sample(cfg, k);
                            equivalence = verify_equivalence(pairs, k);
                            r.measured = std::max(equivalence->max_discrepancy, equivalence->max_middle_discrepancy);
                            r.passed = equivalence->passed;
                            r.detail = std::to_string(equivalence->pairs) + " pairs; max |B_alt - A| " +
                                       sci(equivalence->max_discrepancy) + ", middle identity " +
                                       sci(equivalence->max_middle_discrepancy) + "; " + equivalence->message;
                          }));

  out.push_back(needs_ctx(4, "metric_B == metric_B_alt", 1e-10, 0.0, [&](CriterionResult& r, const KreinContext& k) {
    const auto pairs = equivalence_sample(cfg, k);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Complex alt = equivalence ? equivalence->checks[i].metric_b_alt
                                      : metric_B_alt(pairs[i].first, pairs[i].second, k).value;
      worst = std::max(worst, rel_diff(metric_B(pairs[i].first, pairs[i].second, k).value, alt));
    }
    r.measured = worst;
    r.passed = worst <= 1e-10;
    r.detail = std::to_string(pairs.size()) + " pairs";
  }));

  // 5. Positivity of the metric Grams, indefiniteness of the bare form.
  out.push_back(needs_ctx(5, "Gram positivity and indefiniteness", -1e-9, 0.0,
                          [&](CriterionResult& r, const KreinContext& k) {
                            Rng rng = criterion_rng(cfg.seed, 5);
                            std::vector<KreinVector> vs;
                            std::vector<std::string> labels;
                            for (int i = 0; i < cfg.gram_vectors; ++i) {
                              vs.push_back(random_vector(rng, k));
                              labels.push_back("f" + std::to_string(i));
                            }
                            double min_eig = 0.0;
                            std::string sigs;
                            if (!vs.empty()) {
                              const GramReport a = gram(vs, labels, Form::metric_A, k);
                              const GramReport b = gram(vs, labels, Form::metric_B, k);
                              min_eig = std::min(a.min_eigenvalue(), b.min_eigenvalue());
                              sigs = "metric_A min eig " + sci(a.min_eigenvalue()) + ", metric_B min eig " +
                                     sci(b.min_eigenvalue());
                            }
                            const std::vector<MomentumProfile> pair{MomentumProfile::gaussian(0.05),
                                                                    MomentumProfile::gaussian(5.0)};
                            const GramReport ind = gram(pair, {"g0.05", "g5"}, k.quadrature());
                            const bool indefinite = ind.signature == std::array<int, 3>{1, 0, 1};
                            r.measured = min_eig;
                            r.passed = min_eig >= -1e-9 && indefinite;
                            r.detail = sigs + "; indefinite Gram signature (" + std::to_string(ind.signature[0]) +
                                       ", " + std::to_string(ind.signature[1]) + ", " +
                                       std::to_string(ind.signature[2]) + "), eigenvalues " +
                                       sci(ind.eigenvalues[0]) + ", " + sci(ind.eigenvalues[1]);
                          }));

  // 6. Gaussian sweep.
  out.push_back(run_criterion(6, "Gaussian closed form sweep", 1e-6, 0.0, [&](CriterionResult& r) {
    double worst = 0.0;
    for (double a : {0.05, 0.1404, 0.2807, 1.0, 10.0}) {
      const auto g = MomentumProfile::gaussian(a);
      const double got = indefinite_inner(g, g, cfg.quad).value.real();
      const double want = gaussian_inner_closed_form(a, a);
      const double rel = std::abs(got - want) / std::abs(want);
      worst = std::max(worst, rel);
      r.detail += (r.detail.empty() ? "" : ", ") + fmt("a=%g", a) + ": " + sci(rel);
    }
    r.measured = worst;
    r.passed = worst <= 1e-6;
  }));

  // 7. Canonical decomposition.
  out.push_back(needs_ctx(7, "canonical decomposition", 1e-9, 0.0, [&](CriterionResult& r, const KreinContext& k) {
    Rng rng = criterion_rng(cfg.seed, 7);
    double cross = 0.0, plus_min = HUGE_VAL, minus_max = -HUGE_VAL;
    int mismatches = 0, h_mismatches = 0;
    double ulps = 0.0;
    for (int i = 0; i < cfg.decomposition_vectors; ++i) {
      const KreinVector f = random_vector(rng, k);
      const CanonicalParts p = canonical_decompose(f, k);
      cross = std::max(cross, std::abs(indefinite_inner_k(p.plus, p.minus, k).value));
      plus_min = std::min(plus_min, indefinite_inner_k(p.plus, p.plus, k).value.real());
      minus_max = std::max(minus_max, indefinite_inner_k(p.minus, p.minus, k).value.real());
      const KreinVector back = p.plus + p.minus;
      if (!same_components(back, f)) ++mismatches;
      if (!same_h(back, f)) ++h_mismatches;
      ulps = std::max(ulps, coefficient_ulps(back, f));
    }
    r.measured = std::max({cross, -plus_min, minus_max});
    r.passed = r.measured <= 1e-9 && mismatches == 0;
    r.detail = "max |<f+,f->| " + sci(cross) + ", min <f+,f+> " + sci(plus_min) + ", max <f-,f-> " +
               sci(minus_max) + "; inexact reconstructions " + std::to_string(mismatches) + " of " +
               std::to_string(cfg.decomposition_vectors) + " (h-part " + std::to_string(h_mismatches) +
               ", worst coefficient error " + fmt("%.1f", ulps) + " ulp)";
  }));

  // 8. eta.
  out.push_back(needs_ctx(8, "fundamental symmetry eta", 0.0, 0.0, [&](CriterionResult& r, const KreinContext& k) {
    Rng rng = criterion_rng(cfg.seed, 8);
    int involution = 0, isometry = 0;
    for (int i = 0; i < cfg.eta_vectors; ++i) {
      const KreinVector f = random_vector(rng, k);
      if (!same_components(eta(eta(f)), f)) ++involution;
      const KreinVector u = random_structural_vector(rng, k);
      const KreinVector v = random_structural_vector(rng, k);
      if (indefinite_inner_k(eta(u), eta(v), k).value != indefinite_inner_k(u, v, k).value) ++isometry;
    }
    const bool swaps = same_components(eta(k.v0()), k.chi_star()) && same_components(eta(k.chi_star()), k.v0());
    r.measured = involution + isometry + (swaps ? 0 : 1);
    r.passed = r.measured == 0.0;
    r.detail = "eta^2 != 1 on " + std::to_string(involution) + ", isometry broken on " + std::to_string(isometry) +
               " of " + std::to_string(cfg.eta_vectors) + "; " + std::string(kEtaAssumption);
  }));

  // 9. Commutator consistency.
  out.push_back(run_criterion(9, "commutator W(x) - W(-x) + iD(x)", 1e-8, 0.0, [&](CriterionResult& r) {
    Rng rng = criterion_rng(cfg.seed, 9);
    const auto ladder = default_eps_ladder();
    std::vector<SpacetimePoint> points;
    for (int i = 0; i < cfg.timelike_points; ++i) {
      const double t = uniform(rng, 0.5, 3.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
      points.push_back({t, std::abs(t) * uniform(rng, -0.8, 0.8)});
    }
    for (int i = 0; i < cfg.spacelike_points; ++i) {
      const double x = uniform(rng, 0.5, 3.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
      points.push_back({std::abs(x) * uniform(rng, -0.8, 0.8), x});
    }
    const std::size_t equal_time_begin = points.size();
    for (int i = 0; i < cfg.equal_time_points; ++i)
      points.push_back({0.0, uniform(rng, 0.2, 3.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0)});

    double worst = 0.0;
    int nonzero = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::vector<EpsSample> samples;
      for (double eps : ladder) {
        const Complex res = commutator_residual(points[i], eps);
        samples.push_back({eps, res});
        if (i >= equal_time_begin && res != 0.0) ++nonzero;
      }
      worst = std::max(worst, std::abs(eps_extrapolate(samples, 0).limit));
    }
    r.measured = worst;
    r.passed = worst <= 1e-8 && nonzero == 0;
    r.detail = std::to_string(points.size()) + " points; equal-time samples with nonzero residual: " +
               std::to_string(nonzero);
  }));

  // 10. Position-space route against the momentum-space form.
  out.push_back(run_criterion(10, "position vs momentum inner product", 1e-3, 120.0, [&](CriterionResult& r) {
    Rng rng = criterion_rng(cfg.seed, 10);
    double worst = 0.0;
    for (int i = 0; i < cfg.cross_check_pairs; ++i) {
      const SpacetimeCombination f = random_zero_mean_combination(rng);
      const SpacetimeCombination g = random_zero_mean_combination(rng);
      const Complex momentum = indefinite_inner(mass_shell(f), mass_shell(g), cfg.quad).value;
      const PositionInnerResult position = position_inner_zero_mean(f, g);
      const double rel = std::abs(position.value - momentum) / std::abs(momentum);
      worst = std::max(worst, rel);
      r.detail += (r.detail.empty() ? "" : ", ") + std::string("pair ") + std::to_string(i) + ": " + sci(rel);
    }
    r.measured = worst;
    r.passed = worst <= 1e-3;
  }));

  return report;
}

bool SuiteReport::passed() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

nlohmann::json SuiteReport::to_json() const {
  auto list = nlohmann::json::array();
  for (const auto& c : criteria)
    list.push_back({{"id", c.id},
                    {"name", c.name},
                    {"passed", c.passed},
                    {"measured", c.measured},
                    {"threshold", c.threshold},
                    {"detail", c.detail}});
  return {{"schema", "1"},
          {"seed", seed},
          {"passed", passed()},
          {"assumptions", {std::string(kEtaAssumption)}},
          {"criteria", std::move(list)}};
}

CriterionResult determinism_criterion(const std::string& first, const std::string& second) {
  CriterionResult r;
  r.id = 11;
  r.name = "byte-identical reports";
  r.threshold = 0.0;
  std::size_t diff = 0;
  while (diff < first.size() && diff < second.size() && first[diff] == second[diff]) ++diff;
  r.passed = first == second;
  r.measured = r.passed ? 0.0 : 1.0;
  r.detail = r.passed ? std::to_string(first.size()) + " bytes identical"
                      : "reports differ from byte " + std::to_string(diff);
  return r;
}

std::string format_line(const CriterionResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %2d  %-38s measured %-11.4g limit %-9.3g [%.2f s]", r.passed ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.measured, r.threshold, r.runtime_s);
  std::string line = buf;
  if (!r.detail.empty()) line += "  " + r.detail;
  return line;
}

}  // namespace kreinlab
