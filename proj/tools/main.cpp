#include <CLI11.hpp>
#include <iostream>

#include "layerspec/cli/run.hpp"

using namespace layerspec;

int main(int argc, char** argv) {
  CLI::App app{"Curved quantum layers: geometry checks, bound-state certificates and axisymmetric spectra"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool force = false, defaults = false;
  const std::vector<std::pair<cli::Command, const char*>> commands = {
      {cli::Command::describe, "chart, layer constants and curvature samples"},
      {cli::Command::check, "surface and layer hypotheses"},
      {cli::Command::totals, "total Gauss curvature and total squared mean curvature"},
      {cli::Command::certify, "search the trial families for a negative shifted form"},
      {cli::Command::spectrum, "partial-wave eigenvalues over a surface of revolution"},
      {cli::Command::counterexample, "capped-cylinder layer: radial threshold, shell and truncated spectra"},
      {cli::Command::catalog, "list the built-in surfaces"},
  };
  std::vector<std::pair<CLI::App*, cli::Command>> subs;
  for (const auto& [cmd, help] : commands) {
    auto* sub = app.add_subcommand(cli::to_string(cmd), help);
    if (cmd != cli::Command::catalog) sub->add_option("--config", config_path, "run configuration file");
    sub->add_option("--out", out_dir, "report directory");
    sub->add_flag("--force", force, "accept a layer half-width at or above the curvature radius");
    if (cmd == cli::Command::describe) sub->add_flag("--defaults", defaults, "print every configuration default");
    subs.emplace_back(sub, cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  cli::Command cmd = cli::Command::catalog;
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) cmd = c;
  }
  if (cmd == cli::Command::describe && defaults) {
    std::cout << cli::defaults_text();
    return 0;
  }

  cli::RunConfig config;
  try {
    if (cmd != cli::Command::catalog && config_path.empty()) {
      throw Error(ErrorKind::config, "--config is required for this command");
    }
    config = config_path.empty() ? cli::RunConfig::defaults() : cli::RunConfig::load(config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code(e.kind());
  }
  const auto res = cli::run(cmd, config, {out_dir, force});
  if (res.exit_code == 0) {
    std::cout << res.message;
    for (const auto& f : res.files) std::cout << "wrote " << f << '\n';
  } else {
    std::cerr << "error: " << res.message << '\n';
  }
  return res.exit_code;
}
