#include "kreinlab/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in ") + what + " '" + path + "': " + e.what());
  }
}

KreinContext load_context(const RunConfig& config) {
  if (config.context_path.empty())
    throw ContextInvalid("this command needs a Krein context; create one with 'kreinlab chi-star --context PATH'");
  nlohmann::json j;
  try {
    j = read_json_file(config.context_path, "context file");
  } catch (const ParseError& e) {
    throw ContextInvalid(e.what());
  }
  return KreinContext::from_json(j);
}

// Maps library errors onto exit codes with a one-line message.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NoSignChange& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::no_sign_change;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::non_convergence;
  } catch (const ContextInvalid& e) {
    err << "error: context invalid: " << e.what() << '\n';
    return exit_code::context;
  } catch (const ContextMismatch& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::context;
  } catch (const LightlikeBoundary& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::lightlike;
  } catch (const ToleranceNotMet& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::tolerance;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::precondition;
  }
}

bool is_structural_name(const std::string& s) { return s == "v0" || s == "chi_star" || s == "chi"; }

nlohmann::json parse_spec_json(const std::string& spec) {
  const std::string text = read_spec_text(spec);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("vector spec is neither v0, chi_star, chi nor valid JSON: " + std::string(e.what()));
  }
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw ParseError("unknown format '" + name + "' (expected json or csv)");
}

RunConfig load_run_config(const std::string& path, RunConfig c) {
  const nlohmann::json j = read_json_file(path, "config file");
  if (!j.is_object()) throw ParseError("config file must hold a JSON object");
  try {
    if (j.contains("quadrature")) c.quad = quadrature_from_json(j.at("quadrature"), c.quad);
    if (j.contains("family")) c.family = parse_chi_star_family(j.at("family").get<std::string>());
    if (j.contains("bracket")) c.bracket = j.at("bracket").get<std::array<double, 2>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad config file: ") + e.what());
  }
  c.suite = j;
  return c;
}

std::string read_spec_text(const std::string& spec) {
  if (spec.empty() || spec[0] != '@') return spec;
  std::ifstream in(spec.substr(1));
  if (!in) throw ParseError("cannot open spec file '" + spec.substr(1) + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KreinVector parse_vector_spec(const std::string& spec, const KreinContext& ctx) {
  if (spec == "v0") return ctx.v0();
  if (spec == "chi_star") return ctx.chi_star();
  if (spec == "chi") return ctx.chi();
  const nlohmann::json j = parse_spec_json(spec);
  if (j.is_object() && (j.contains("alpha") || j.contains("beta") || j.contains("h"))) {
    try {
      KreinVector f = j.contains("h") ? ctx.embed(profile_from_json(j.at("h"))) : ctx.zero();
      if (j.contains("alpha")) f = f + complex_from_json(j.at("alpha")) * ctx.v0();
      if (j.contains("beta")) f = f + complex_from_json(j.at("beta")) * ctx.chi_star();
      return f;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad Krein vector spec: ") + e.what());
    }
  }
  return ctx.embed(profile_from_json(j));
}

int cmd_chi_star(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto bracket = config.bracket.value_or(default_chi_star_bracket(config.family));
    const KreinContext ctx = KreinContext::build(config.family, bracket, config.quad);
    const ChiStar& cs = ctx.chi_star_data();
    if (!config.context_path.empty()) {
      std::ofstream file(config.context_path);
      if (!file) throw ParseError("cannot write context file '" + config.context_path + "'");
      file << ctx.to_json().dump(2) << '\n';
    }
    if (config.format == OutputFormat::csv) {
      out << "family,parameter,residual\n"
          << family_name(cs.family) << ',' << num(cs.parameter) << ',' << num(cs.residual) << '\n';
    } else {
      nlohmann::json report{{"schema", "1"},
                            {"family", std::string(family_name(cs.family))},
                            {"bracket", bracket},
                            {"parameter", cs.parameter},
                            {"residual", cs.residual},
                            {"null_tolerance", kNullTolerance}};
      if (!config.context_path.empty()) report["context_file"] = config.context_path;
      out << report.dump(2) << '\n';
    }
    return exit_code::ok;
  });
}

int cmd_inner(const RunConfig& config, const std::string& f_spec, const std::string& g_spec, Form form,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Estimate value;
    const bool bare = form == Form::indefinite && !is_structural_name(f_spec) && !is_structural_name(g_spec) &&
                      config.context_path.empty();
    if (bare) {
      // Two plain profiles under the indefinite form need no context.
      const nlohmann::json fj = parse_spec_json(f_spec), gj = parse_spec_json(g_spec);
      value = indefinite_inner(profile_from_json(fj), profile_from_json(gj), config.quad).estimate();
    } else {
      const KreinContext ctx = load_context(config);
      const KreinVector f = parse_vector_spec(f_spec, ctx);
      const KreinVector g = parse_vector_spec(g_spec, ctx);
      switch (form) {
        case Form::indefinite:
          value = indefinite_inner_k(f, g, ctx);
          break;
        case Form::metric_A:
          value = metric_A(f, g, ctx);
          break;
        case Form::metric_B:
          value = metric_B(f, g, ctx);
          break;
      }
    }
    if (config.format == OutputFormat::csv) {
      out << "form,re,im,error\n"
          << form_name(form) << ',' << num(value.value.real()) << ',' << num(value.value.imag()) << ','
          << num(value.error) << '\n';
    } else {
      nlohmann::json report{{"schema", "1"},
                            {"form", std::string(form_name(form))},
                            {"value", complex_to_json(value.value)},
                            {"error", value.error}};
      out << report.dump(2) << '\n';
    }
    return exit_code::ok;
  });
}

int cmd_gram(const RunConfig& config, const std::vector<std::string>& specs, Form form, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    if (specs.empty()) throw ParseError("gram needs at least one vector spec");
    const KreinContext ctx = load_context(config);
    std::vector<KreinVector> vs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      vs.push_back(parse_vector_spec(specs[i], ctx));
      labels.push_back(is_structural_name(specs[i]) ? specs[i] : "f" + std::to_string(i));
    }
    const GramReport report = gram(vs, labels, form, ctx);
    if (config.format == OutputFormat::csv) {
      out << "row,col,re,im\n";
      for (Eigen::Index i = 0; i < report.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < report.matrix.cols(); ++j)
          out << report.labels[i] << ',' << report.labels[j] << ',' << num(report.matrix(i, j).real()) << ','
              << num(report.matrix(i, j).imag()) << '\n';
    } else {
      nlohmann::json j = report.to_json();
      if (form != Form::indefinite) j["assumptions"] = {std::string(kEtaAssumption)};
      out << j.dump(2) << '\n';
    }
    return exit_code::ok;
  });
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SuiteConfig suite;
    if (config.suite.is_object()) suite = suite_config_from_json(config.suite, suite);
    suite.seed = config.seed;
    if (!config.context_path.empty()) {
      // Validate up front so a corrupted file is reported as such.
      const KreinContext ctx = load_context(config);
      suite.context = ctx.to_json();
    }

    const SuiteReport first = run_suite(suite);
    const SuiteReport second = run_suite(suite);
    const std::string a = first.to_json().dump(2);
    const std::string b = second.to_json().dump(2);

    SuiteReport report = first;
    report.criteria.push_back(determinism_criterion(a, b));
    for (const auto& c : report.criteria) err << format_line(c) << '\n';
    out << report.to_json().dump(2) << '\n';
    return report.passed() ? exit_code::ok : exit_code::verify_failed;
  });
}

int cmd_wfunc(const RunConfig& config, const LineSpec& line, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (line.count < 0) throw ParseError("count must be non-negative");
    if (line.eps && !(*line.eps > 0.0)) throw ParseError("eps must be positive");
    std::vector<SpacetimePoint> points;
    for (int i = 0; i < line.count; ++i) {
      const double s = line.count == 1 ? 0.0 : static_cast<double>(i) / (line.count - 1);
      const SpacetimePoint p{line.from.t + s * (line.to.t - line.from.t), line.from.x + s * (line.to.x - line.from.x)};
      if (p.causal_class() == CausalClass::lightlike)
        throw LightlikeBoundary("row " + std::to_string(i) + " at (" + num(p.t) + ", " + num(p.x) +
                                ") lies within " + num(kLightlikeBand) + " of the light cone");
      points.push_back(p);
    }
    if (points.empty()) return exit_code::ok;

    const auto ladder = default_eps_ladder();
    auto row_value = [&](SpacetimePoint p) {
      return line.eps ? w_position(p, *line.eps) : w_position_limit(p, ladder).limit;
    };
    if (config.format == OutputFormat::json) {
      auto rows = nlohmann::json::array();
      for (const auto& p : points) {
        const Complex w = row_value(p);
        rows.push_back({p.t, p.x, w.real(), w.imag(), d_commutator(p)});
      }
      nlohmann::json report{{"schema", "1"}, {"columns", {"x0", "x1", "ReW", "ImW", "D"}}, {"rows", rows}};
      report["eps"] = line.eps ? nlohmann::json(*line.eps) : nlohmann::json("limit");
      out << report.dump(2) << '\n';
    } else {
      out << "x0,x1,ReW,ImW,D\n";
      for (const auto& p : points) {
        const Complex w = row_value(p);
        out << num(p.t) << ',' << num(p.x) << ',' << num(w.real()) << ',' << num(w.imag()) << ','
            << num(d_commutator(p)) << '\n';
      }
    }
    return exit_code::ok;
  });
}

}  // namespace kreinlab
