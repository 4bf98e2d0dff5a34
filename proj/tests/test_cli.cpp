#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "layerspec/cli/catalog.hpp"
#include "layerspec/cli/config.hpp"
#include "layerspec/cli/run.hpp"

using namespace layerspec;
using namespace layerspec::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::invalid_input;
}

// Every numeric leaf sits in an object carrying "value" plus "error" or "exact".
void check_numbers(const json& j, const std::string& path, bool parent_ok) {
  if (j.is_object()) {
    const bool wrapped = j.contains("value") && (j.contains("error") || j.contains("exact"));
    for (const auto& [k, v] : j.items()) {
      if (path.empty() && k == "schema_version") continue;
      check_numbers(v, path + "/" + k, wrapped && (k == "value" || k == "error"));
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_numbers(j[i], path + "/" + std::to_string(i), false);
  } else if (j.is_number()) {
    INFO(path);
    CHECK(parent_ok);
  }
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("layerspec_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LAYERSPEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("config: sections, comments and typed values") {
  const auto cfg = RunConfig::parse(
      "# run\n[surface]\nname = hyperboloid   # trailing comment\nz0 = 2\n\n"
      "layer.a = 0.25\n[certify]\nstrategies = thin_layer, symmetric_log\nns = 8, 16\n");
  CHECK(cfg.text("surface.name") == "hyperboloid");
  CHECK(cfg.number("layer.a") == 0.25);  // sectioned keys stay absolute after a header
  CHECK(cfg.texts("certify.strategies") == std::vector<std::string>{"thin_layer", "symmetric_log"});
  CHECK(cfg.integers("certify.ns") == std::vector<int>{8, 16});
  CHECK(cfg.surface_params() == std::map<std::string, double>{{"z0", 2.0}});
  CHECK(cfg.number("spectrum.S") == 20.0);  // default filled in
  CHECK(cfg.set_by_user("layer.a"));
  CHECK_FALSE(cfg.set_by_user("spectrum.S"));
}

TEST_CASE("config: rejects unknown keys, duplicates and bad values") {
  CHECK(kind_of([] { RunConfig::parse("layer.b = 1\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("[layer]\nthickness = 1\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("layer.a = 1\nlayer.a = 2\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("layer.a = thin\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("spectrum.k = 2.5\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("check.omega0_scan = yes\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("a = 1\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("[layer\na = 1\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::parse("surface.z0 = high\n"); }) == ErrorKind::config);
  CHECK(kind_of([] { RunConfig::load("/nonexistent/run.cfg"); }) == ErrorKind::config);
  // Surface parameters are checked against the chosen entry.
  const auto cfg = RunConfig::parse("surface.name = plane\nsurface.z0 = 1\n");
  CHECK(kind_of([&] { execute(Command::describe, cfg, false); }) == ErrorKind::config);
  const auto strat = RunConfig::parse("surface.name = plane\ncertify.strategies = newton\n");
  CHECK(kind_of([&] { execute(Command::certify, strat, false); }) == ErrorKind::config);
}

TEST_CASE("config: printed defaults parse back to the defaults") {
  const auto back = RunConfig::parse(defaults_text());
  CHECK(back.values() == RunConfig::defaults().values());
  for (const auto& k : config_schema()) CHECK(defaults_text().find(k.key.substr(k.key.find('.') + 1)) != std::string::npos);
}

TEST_CASE("catalog: fixed entries and documentation-only pole") {
  const auto& c = catalog();
  REQUIRE(c.size() == 7);
  const std::vector<std::string> names{"hyperbolic_paraboloid", "monkey_saddle", "elliptic_paraboloid", "hyperboloid",
                                       "exm", "capped_cylinder", "ex_pole"};
  for (std::size_t i = 0; i < names.size(); ++i) CHECK(c[i].name == names[i]);
  CHECK(find_surface("hyperboloid").defaults.at("z0") == 1.0);
  CHECK(find_surface("ex_pole").construction == Construction::none);
  const auto out = execute(Command::catalog, RunConfig::defaults(), false);
  CHECK(out.report["entries"].size() == 8);
  for (Command cmd : {Command::describe, Command::check, Command::totals, Command::certify, Command::spectrum}) {
    const auto cfg = RunConfig::parse("surface.name = ex_pole\n");
    CHECK(kind_of([&] { execute(cmd, cfg, false); }) == ErrorKind::capability);
  }
}

TEST_CASE("totals: saddle total curvature") {
  const auto out = execute(Command::totals, RunConfig::parse("surface.name = hyperbolic_paraboloid\n"), false);
  const double K = out.report["total_gauss"]["value"].get<double>();
  CHECK(std::abs(K + 2 * kPi) < 0.01 * 2 * kPi);
  CHECK(out.report["total_gauss"]["divergent"] == false);
  check_numbers(out.report, "", false);
}

TEST_CASE("check: capped cylinder is not asymptotically planar") {
  const auto cfg = RunConfig::parse("surface.name = capped_cylinder\nlayer.a = 0.3\n");
  const auto out = execute(Command::check, cfg, false);
  CHECK(out.report["hypotheses"]["sigma0"]["pass"] == false);
  CHECK(out.report["layer"]["omega1"]["pass"] == true);
  check_numbers(out.report, "", false);
  const auto dir = scratch("check");
  const auto res = run(Command::check, cfg, {dir.string(), false});
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "check.json"));
  CHECK(fs::exists(dir / "check.timings.json"));
  CHECK(fs::exists(dir / "check_annuli.csv"));
}

TEST_CASE("check: layer thicker than the curvature radius") {
  const auto cfg = RunConfig::parse("surface.name = capped_cylinder\nlayer.a = 1.5\n");
  CHECK(kind_of([&] { execute(Command::check, cfg, false); }) == ErrorKind::hypothesis_violation);
  const auto dir = scratch("force");
  CHECK(run(Command::check, cfg, {dir.string(), false}).exit_code == 2);
  std::ifstream f(dir / "check.json");
  const auto err = json::parse(f);
  CHECK(err["status"] == "error");
  CHECK(err["error"]["kind"] == "hypothesis-violation");
  const auto forced = execute(Command::check, RunConfig::parse("surface.name = capped_cylinder\nlayer.a = 0.99\n"), true);
  CHECK(forced.report["layer"]["omega1"]["pass"] == false);
  CHECK_FALSE(forced.report["layer"]["warnings"].empty());
}

TEST_CASE("certify: plane returns not-found") {
  const auto out = execute(Command::certify, RunConfig::parse("surface.name = plane\n"), false);
  CHECK(out.report["certificate"]["verdict"] == "not-found");
  CHECK(out.report["certificate"]["best_q_tilde"]["value"].get<double>() >= 0.0);
  check_numbers(out.report, "", false);
}

TEST_CASE("spectrum: report and CSV layout") {
  const auto cfg = RunConfig::parse("surface.name = plane\nlayer.a = 0.3\nspectrum.S = 8\nspectrum.h_s = 0.25\n"
                                    "spectrum.n_u = 17\nspectrum.m = 0, 1\nspectrum.levels = 2\n");
  const auto out = execute(Command::spectrum, cfg, false);
  REQUIRE(out.tables.size() == 2);
  CHECK(out.tables[0].header == std::vector<std::string>{"m", "index", "eigenvalue", "threshold", "below_threshold",
                                                         "mesh_h_s", "mesh_h_u", "S"});
  CHECK(out.tables[0].rows.size() == 6);
  for (const auto& row : out.tables[0].rows) CHECK(row[4] == "false");
  const auto& waves = out.report["partial_waves"];
  REQUIRE(waves.size() == 2);
  CHECK(waves[0]["eigenvalues"][0]["eigenvalue"]["value"].get<double>() <
        waves[1]["eigenvalues"][0]["eigenvalue"]["value"].get<double>());
  CHECK(waves[0]["convergence"].size() == 2);
  check_numbers(out.report, "", false);
  const auto graph = RunConfig::parse("surface.name = hyperbolic_paraboloid\n");
  CHECK(kind_of([&] { execute(Command::spectrum, graph, false); }) == ErrorKind::capability);
}

TEST_CASE("counterexample: pipeline report") {
  const auto cfg = RunConfig::parse("layer.a = 0.3\ncounterexample.S = 10, 20\ncounterexample.h_s = 0.2\n"
                                    "counterexample.n_u = 17\n");
  const auto out = execute(Command::counterexample, cfg, false);
  CHECK(out.report["radial"]["in_sandwich"] == true);
  CHECK(out.report["full_layer"].size() == 2);
  for (const auto& r : out.report["full_layer"]) CHECK(r["no_eigenvalue_below_eps1"] == true);
  CHECK(out.report["verdict"].get<std::string>().rfind("no eigenvalue found below eps1", 0) == 0);
  check_numbers(out.report, "", false);
  CHECK(kind_of([] { execute(Command::counterexample, RunConfig::parse("layer.a = 1.2\n"), false); }) ==
        ErrorKind::hypothesis_violation);
}

TEST_CASE("reports are reproducible") {
  const auto cfg = RunConfig::parse("surface.name = hyperboloid\nlayer.a = 0.3\ncertify.strategies = thin_layer\n"
                                    "certify.sigmas = 0.1\n");
  const auto d1 = scratch("repro1"), d2 = scratch("repro2");
  REQUIRE(run(Command::certify, cfg, {d1.string(), false}).exit_code == 0);
  REQUIRE(run(Command::certify, cfg, {d2.string(), false}).exit_code == 0);
  const auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  CHECK(slurp(d1 / "certify.json") == slurp(d2 / "certify.json"));
  CHECK(slurp(d1 / "certify_attempts.csv") == slurp(d2 / "certify_attempts.csv"));
  const auto report = json::parse(slurp(d1 / "certify.json"));
  CHECK(report["schema_version"] == kSchemaVersion);
  CHECK_FALSE(report.contains("timings"));
}

TEST_CASE("binary: exit codes") {
  const auto dir = scratch("binary");
  const auto out = " --out " + dir.string();
  CHECK(run_binary("catalog" + out) == 0);
  CHECK(run_binary("describe --defaults") == 0);
  CHECK(run_binary("check --config " + write_config(dir, "cyl.cfg", "surface.name = capped_cylinder\nlayer.a = 0.3\n") + out) == 0);
  CHECK(run_binary("check --config " + write_config(dir, "thick.cfg", "surface.name = capped_cylinder\nlayer.a = 1.5\n") + out) == 2);
  CHECK(run_binary("check --force --config " + write_config(dir, "forced.cfg", "surface.name = capped_cylinder\nlayer.a = 0.99\n") + out) == 0);
  CHECK(run_binary("totals --config " + write_config(dir, "pole.cfg", "surface.name = ex_pole\n") + out) == 4);
  CHECK(run_binary("totals --config " + write_config(dir, "bad.cfg", "surface.name = plane\nlayer.thick = 1\n") + out) == 4);
  CHECK(run_binary("totals" + out) == 4);
  CHECK(run_binary("frobnicate") == 4);
  CHECK(run_binary("spectrum --config " + write_config(dir, "trunc.cfg", "surface.name = capped_cylinder\nlayer.a = 0.3\nspectrum.S = 500\n") + out) == 3);
}
