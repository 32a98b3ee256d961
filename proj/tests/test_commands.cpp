#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "kreinlab/commands.hpp"

using namespace kreinlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("kreinlab_cmd_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const std::string& context_file() {
  static const std::string path = [] {
    RunConfig c;
    c.quad = {1e-13, 1e-12};
    c.context_path = (scratch_dir() / "ctx.json").string();
    std::ostringstream out, err;
    if (cmd_chi_star(c, out, err) != exit_code::ok) throw std::runtime_error(err.str());
    return c.context_path;
  }();
  return path;
}

RunConfig with_context() {
  RunConfig c;
  c.context_path = context_file();
  return c;
}

struct CmdRun {
  int code;
  std::string out, err;
};

template <class F>
CmdRun capture(F&& f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(ChiStarCommand, GaussianDefaultBracket) {
  RunConfig c;
  c.quad = {1e-13, 1e-12};
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_chi_star(c, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("schema"), "1");
  EXPECT_NEAR(j.at("parameter").get<double>(), 0.280730, 1e-6);
  EXPECT_LE(std::abs(j.at("residual").get<double>()), 1e-8);
}

TEST(ChiStarCommand, SavedContextReproducesParameter) {
  std::ifstream in(context_file());
  const auto saved = nlohmann::json::parse(in);
  const KreinContext ctx = KreinContext::from_json(saved);
  EXPECT_NEAR(ctx.parameter(), 0.28072974178344258491, 1e-10);
  RunConfig c;
  c.quad = {1e-13, 1e-12};
  const CmdRun again = capture([&](auto& o, auto& e) { return cmd_chi_star(c, o, e); });
  EXPECT_NEAR(nlohmann::json::parse(again.out).at("parameter").get<double>(), ctx.parameter(), 1e-10);
}

TEST(ChiStarCommand, NoSignChangeExitCode) {
  RunConfig c;
  c.bracket = std::array<double, 2>{1.0, 2.0};
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_chi_star(c, o, e); });
  EXPECT_EQ(r.code, exit_code::no_sign_change);
  EXPECT_NE(r.err.find("sign"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(InnerCommand, GaussianWithItself) {
  RunConfig c;
  c.quad = {1e-13, 1e-12};
  const std::string g = R"({"family":"gaussian","a":5})";
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_inner(c, g, g, Form::indefinite, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("value")[0].get<double>(), -0.22916726286943393041, 1e-11);
  EXPECT_EQ(j.at("value")[1].get<double>(), 0.0);
  EXPECT_GE(j.at("error").get<double>(), 0.0);
}

TEST(InnerCommand, StructuralMetricValues) {
  const RunConfig c = with_context();
  const CmdRun a = capture([&](auto& o, auto& e) { return cmd_inner(c, "v0", "v0", Form::metric_A, o, e); });
  ASSERT_EQ(a.code, exit_code::ok) << a.err;
  EXPECT_EQ(nlohmann::json::parse(a.out).at("value"), nlohmann::json::parse("[1.0, 0.0]"));
  const CmdRun b = capture([&](auto& o, auto& e) { return cmd_inner(c, "chi", "chi", Form::metric_B, o, e); });
  ASSERT_EQ(b.code, exit_code::ok) << b.err;
  EXPECT_NEAR(nlohmann::json::parse(b.out).at("value")[0].get<double>(), 1.0, 1e-15);
}

TEST(InnerCommand, SpecFromFileAndCsv) {
  const fs::path spec = scratch_dir() / "f.json";
  std::ofstream(spec) << R"({"h":{"family":"gaussian","a":0.5},"alpha":[0,1]})";
  RunConfig c = with_context();
  c.format = OutputFormat::csv;
  const CmdRun r =
      capture([&](auto& o, auto& e) { return cmd_inner(c, "@" + spec.string(), "v0", Form::indefinite, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"form", "re", "im", "error"}));
  // <f, v0> = conj(beta_f) = conj(f(0)) = 1
  EXPECT_EQ(std::stod(rows[1][1]), 1.0);
  EXPECT_EQ(std::stod(rows[1][2]), 0.0);
}

TEST(InnerCommand, Errors) {
  RunConfig bare;
  const CmdRun missing = capture([&](auto& o, auto& e) { return cmd_inner(bare, "v0", "v0", Form::metric_A, o, e); });
  EXPECT_EQ(missing.code, exit_code::context);
  const CmdRun parse = capture([&](auto& o, auto& e) {
    return cmd_inner(bare, "{not json", R"({"family":"gaussian","a":1})", Form::indefinite, o, e);
  });
  EXPECT_EQ(parse.code, exit_code::usage);
  const CmdRun family = capture([&](auto& o, auto& e) {
    return cmd_inner(bare, R"({"family":"cauchy"})", R"({"family":"gaussian","a":1})", Form::indefinite, o, e);
  });
  EXPECT_EQ(family.code, exit_code::usage);
  const CmdRun nofile = capture([&](auto& o, auto& e) { return cmd_inner(bare, "@/no/such/file", "v0", Form::metric_A, o, e); });
  EXPECT_NE(nofile.code, exit_code::ok);
}

TEST(InnerCommand, CorruptedContext) {
  std::ifstream in(context_file());
  auto j = nlohmann::json::parse(in);
  j["residual"] = 0.1;
  const fs::path bad = scratch_dir() / "bad_ctx.json";
  std::ofstream(bad) << j.dump();
  RunConfig c;
  c.context_path = bad.string();
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_inner(c, "v0", "v0", Form::metric_A, o, e); });
  EXPECT_EQ(r.code, exit_code::context);
  EXPECT_NE(r.err.find("residual"), std::string::npos);
  const CmdRun v = capture([&](auto& o, auto& e) { return cmd_verify(c, o, e); });
  EXPECT_EQ(v.code, exit_code::context);
  EXPECT_NE(v.err.find("context invalid"), std::string::npos);
}

TEST(GramCommand, StructuralSignature) {
  const RunConfig c = with_context();
  const CmdRun r = capture([&](auto& o, auto& e) {
    return cmd_gram(c, {"v0", "chi_star"}, Form::indefinite, o, e);
  });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("signature"), nlohmann::json::parse("[1,0,1]"));
  EXPECT_EQ(j.at("labels"), nlohmann::json::parse(R"(["v0","chi_star"])"));
}

TEST(WfuncCommand, SpacelikeEqualTimeLine) {
  RunConfig c;
  c.format = OutputFormat::csv;
  const LineSpec line{{0.0, 0.5}, {0.0, 4.0}, 8, std::nullopt};
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_wfunc(c, line, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x0", "x1", "ReW", "ImW", "D"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][3]), 0.0);
    EXPECT_EQ(std::stod(rows[i][4]), 0.0);
  }
  EXPECT_EQ(std::stod(rows[8][1]), 4.0);
}

TEST(WfuncCommand, TimelikeLine) {
  RunConfig c;
  c.format = OutputFormat::csv;
  const LineSpec line{{0.5, 0.0}, {4.0, 0.0}, 5, std::nullopt};
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_wfunc(c, line, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto rows = csv_rows(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_NEAR(std::stod(rows[i][3]), -0.25, 1e-10);
    EXPECT_EQ(std::stod(rows[i][4]), 0.5);
  }
}

TEST(WfuncCommand, FixedEpsAndJson) {
  RunConfig c;
  const LineSpec line{{1.0, 0.0}, {1.0, 0.5}, 3, 1e-3};
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_wfunc(c, line, o, e); });
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("rows").size(), 3u);
  EXPECT_EQ(j.at("eps"), 1e-3);
  const auto row = j.at("rows")[0];
  EXPECT_NEAR(row[3].get<double>(), (-std::atan2(1e-3, -1.0) / (4.0 * std::numbers::pi)), 1e-15);
}

TEST(WfuncCommand, EmptyAndLightlike) {
  RunConfig c;
  c.format = OutputFormat::csv;
  const CmdRun empty = capture([&](auto& o, auto& e) { return cmd_wfunc(c, {{0.0, 1.0}, {0.0, 2.0}, 0, {}}, o, e); });
  EXPECT_EQ(empty.code, exit_code::ok);
  EXPECT_TRUE(empty.out.empty());
  const CmdRun light = capture([&](auto& o, auto& e) { return cmd_wfunc(c, {{0.0, 1.0}, {2.0, 1.0}, 3, {}}, o, e); });
  EXPECT_EQ(light.code, exit_code::lightlike);
  EXPECT_NE(light.err.find("row 1"), std::string::npos);
  EXPECT_TRUE(light.out.empty());
}

TEST(VerifyCommand, UnattainableToleranceFailsGracefully) {
  const fs::path cfg = scratch_dir() / "tight.json";
  std::ofstream(cfg) << R"({"quadrature":{"abs_tol":1e-17,"rel_tol":1e-17,"max_intervals":16},
                            "equivalence_pairs":4,"decomposition_vectors":4,"eta_vectors":4,"cross_check_pairs":1})";
  const RunConfig c = load_run_config(cfg.string());
  const CmdRun r = capture([&](auto& o, auto& e) { return cmd_verify(c, o, e); });
  EXPECT_EQ(r.code, exit_code::verify_failed);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.at("passed").get<bool>());
  const auto& crit = j.at("criteria");
  ASSERT_EQ(crit.size(), 11u);
  for (int id : {1, 6}) {
    const auto& c1 = crit[id - 1];
    EXPECT_EQ(c1.at("id"), id);
    EXPECT_FALSE(c1.at("passed").get<bool>());
    EXPECT_GT(c1.at("measured").get<double>(), 1e-17);
    EXPECT_NE(c1.at("detail").get<std::string>().find("tolerance"), std::string::npos);
  }
  // Criteria that need no quadrature still run.
  EXPECT_TRUE(crit[8].at("passed").get<bool>());
  EXPECT_TRUE(crit[10].at("passed").get<bool>());
  EXPECT_NE(r.err.find("FAIL  1"), std::string::npos);
}

TEST(Config, Errors) {
  EXPECT_THROW(load_run_config("/no/such/config.json"), ParseError);
  const fs::path bad = scratch_dir() / "bad_cfg.json";
  std::ofstream(bad) << R"({"quadrature":{"abs_tol":-1}})";
  EXPECT_THROW(load_run_config(bad.string()), Error);
  EXPECT_THROW(parse_format("xml"), ParseError);
}
