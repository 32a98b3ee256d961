#pragma once

// Command implementations behind the kreinlab executable. Each returns a
// process exit code and writes only to the streams it is given.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kreinlab/acceptance.hpp"
#include "kreinlab/krein.hpp"
#include "kreinlab/wightman.hpp"

namespace kreinlab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int usage = 2;
inline constexpr int no_sign_change = 3;
inline constexpr int non_convergence = 4;
inline constexpr int context = 5;
inline constexpr int lightlike = 6;
inline constexpr int tolerance = 7;
inline constexpr int precondition = 8;
}  // namespace exit_code

enum class OutputFormat { json, csv };

struct RunConfig {
  QuadratureConfig quad;
  ChiStarFamily family = ChiStarFamily::gaussian;
  std::optional<std::array<double, 2>> bracket;
  std::uint64_t seed = 7;
  std::string context_path;  // --context
  std::string out_path;      // --out; empty means stdout
  OutputFormat format = OutputFormat::json;
  // Verify-only overrides read from the config file.
  nlohmann::json suite;
};

// Applies a --config file (JSON) to `base`. Keys: quadrature, family, bracket,
// seed, plus any verify-suite keys (see suite_config_from_json).
RunConfig load_run_config(const std::string& path, RunConfig base = {});

OutputFormat parse_format(const std::string& name);

// Reads "@path" files; returns inline text unchanged.
std::string read_spec_text(const std::string& spec);

// "v0", "chi_star", "chi", a profile object, or {"h":profile,"alpha":z,"beta":z}.
// Profiles are embedded into the context.
KreinVector parse_vector_spec(const std::string& spec, const KreinContext& ctx);

struct LineSpec {
  SpacetimePoint from;
  SpacetimePoint to;
  int count = 0;
  std::optional<double> eps;  // absent: eps -> 0 limit
};

int cmd_chi_star(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_inner(const RunConfig& config, const std::string& f_spec, const std::string& g_spec, Form form,
              std::ostream& out, std::ostream& err);
int cmd_gram(const RunConfig& config, const std::vector<std::string>& specs, Form form, std::ostream& out,
             std::ostream& err);
// Runs the acceptance suite twice, appends the determinism criterion, prints
// the JSON report to `out` and one line per criterion to `err`.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_wfunc(const RunConfig& config, const LineSpec& line, std::ostream& out, std::ostream& err);

}  // namespace kreinlab
