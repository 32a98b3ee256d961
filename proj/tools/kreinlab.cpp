// kreinlab: command-line front end for the indefinite-metric toolkit.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kreinlab/commands.hpp"
#include "kreinlab/errors.hpp"

namespace {

bool parse_point(const std::string& text, kreinlab::SpacetimePoint& p) {
  std::istringstream in(text);
  char comma = 0;
  return static_cast<bool>(in >> p.t >> comma >> p.x) && comma == ',' && (in >> std::ws).eof();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kreinlab;

  CLI::App app{"kreinlab: indefinite inner products, Krein metrics and Wightman function samples"};
  app.require_subcommand(1);

  std::string config_path, context_path, out_path, format_name, form_name_arg = "indefinite";
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--context", context_path, "Krein context file");
    cmd->add_option("--out", out_path, "write the report here instead of stdout");
    cmd->add_option("--format", format_name, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", seed, "random seed");
  };

  auto* chi = app.add_subcommand("chi-star", "solve for the null profile chi* and optionally save a context");
  std::string family_arg;
  std::vector<double> bracket_arg;
  common(chi);
  chi->add_option("--family", family_arg, "gaussian or bump")->check(CLI::IsMember({"gaussian", "bump"}));
  chi->add_option("--bracket", bracket_arg, "parameter bracket LO HI")->expected(2);

  auto* inner = app.add_subcommand("inner", "evaluate a form on two vectors");
  std::string f_spec, g_spec;
  common(inner);
  inner->add_option("f", f_spec, "v0 | chi_star | chi | profile JSON | @file")->required();
  inner->add_option("g", g_spec, "v0 | chi_star | chi | profile JSON | @file")->required();
  inner->add_option("--form", form_name_arg, "indefinite, metric_A or metric_B")
      ->check(CLI::IsMember({"indefinite", "metric_A", "metric_B"}));

  auto* gram_cmd = app.add_subcommand("gram", "Gram matrix, eigenvalues and signature of a vector set");
  std::vector<std::string> gram_specs;
  common(gram_cmd);
  gram_cmd->add_option("vectors", gram_specs, "vector specs")->required();
  gram_cmd->add_option("--form", form_name_arg, "indefinite, metric_A or metric_B")
      ->check(CLI::IsMember({"indefinite", "metric_A", "metric_B"}));

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  common(verify);

  auto* wfunc = app.add_subcommand("wfunc", "sample W(x) and D(x) along a straight line");
  std::string from_arg, to_arg;
  int count = 0;
  std::optional<double> eps;
  common(wfunc);
  wfunc->add_option("--from", from_arg, "start point T,X")->required();
  wfunc->add_option("--to", to_arg, "end point T,X")->required();
  wfunc->add_option("--count", count, "number of samples")->required()->check(CLI::NonNegativeNumber);
  wfunc->add_option("--eps", eps, "fixed regulator; default is the eps -> 0 limit");

  // Default format depends on the subcommand; an explicit --format overrides it.
  chi->preparse_callback([&](std::size_t) { format_name = "json"; });
  inner->preparse_callback([&](std::size_t) { format_name = "json"; });
  gram_cmd->preparse_callback([&](std::size_t) { format_name = "json"; });
  verify->preparse_callback([&](std::size_t) { format_name = "json"; });
  wfunc->preparse_callback([&](std::size_t) { format_name = "csv"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::usage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_run_config(config_path, config);
    if (seed) config.seed = *seed;
    if (!family_arg.empty()) config.family = parse_chi_star_family(family_arg);
    if (!bracket_arg.empty()) config.bracket = std::array<double, 2>{bracket_arg[0], bracket_arg[1]};
    config.context_path = context_path;
    config.out_path = out_path;
    config.format = parse_format(format_name);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::usage;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return exit_code::usage;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  const Form form = parse_form(form_name_arg);

  if (*chi) return cmd_chi_star(config, out, std::cerr);
  if (*inner) return cmd_inner(config, f_spec, g_spec, form, out, std::cerr);
  if (*gram_cmd) return cmd_gram(config, gram_specs, form, out, std::cerr);
  if (*verify) return cmd_verify(config, out, std::cerr);

  LineSpec line;
  line.count = count;
  line.eps = eps;
  if (!parse_point(from_arg, line.from) || !parse_point(to_arg, line.to)) {
    std::cerr << "error: points are written T,X (for example 0,0.5)\n";
    return exit_code::usage;
  }
  return cmd_wfunc(config, line, out, std::cerr);
}
