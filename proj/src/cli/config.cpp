#include "layerspec/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "layerspec/error.hpp"

namespace layerspec::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, what); }

double to_number(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x)) config_error(key + ": expected a number, got '" + v + "'");
  return x;
}

int to_integer(const std::string& key, const std::string& v) {
  int x = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) config_error(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_boolean(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_type(const std::string& key, ValueType t, const std::string& v) {
  switch (t) {
    case ValueType::number: to_number(key, v); break;
    case ValueType::integer: to_integer(key, v); break;
    case ValueType::boolean: to_boolean(key, v); break;
    case ValueType::text: break;
    case ValueType::number_list:
      for (const auto& x : split_list(v)) to_number(key, x);
      break;
    case ValueType::integer_list:
      for (const auto& x : split_list(v)) to_integer(key, x);
      break;
    case ValueType::text_list: break;
  }
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

}  // namespace

const char* to_string(ValueType t) noexcept {
  switch (t) {
    case ValueType::number: return "number";
    case ValueType::integer: return "integer";
    case ValueType::boolean: return "boolean";
    case ValueType::text: return "text";
    case ValueType::number_list: return "number list";
    case ValueType::integer_list: return "integer list";
    case ValueType::text_list: return "text list";
  }
  return "?";
}

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = {
      {"surface.name", ValueType::text, "", "catalog entry (see `layerspec catalog`); surface.<param> overrides its defaults"},
      {"layer.a", ValueType::number, "0.1", "half-width of the layer"},
      {"describe.s_min", ValueType::number, "0.01", "smallest sampled radius"},
      {"describe.s_max", ValueType::number, "100", "largest sampled radius (capped by the chart)"},
      {"describe.s_samples", ValueType::integer, "32", "geometrically spaced radii"},
      {"describe.theta_samples", ValueType::integer, "8", "angles per radius (1 on axisymmetric charts)"},
      {"check.s0", ValueType::number, "1", "first probe radius"},
      {"check.s_max", ValueType::number, "0", "last probe radius (0: the chart's s_max)"},
      {"check.omega0_scan", ValueType::boolean, "true", "run the sampled self-intersection heuristic"},
      {"totals.s0", ValueType::number, "1", "first truncation radius"},
      {"totals.s_max", ValueType::number, "0", "last truncation radius (0: the chart's s_max)"},
      {"totals.rel_tol", ValueType::number, "1e-10", "relative tolerance of the radial quadrature"},
      {"totals.angular_tol", ValueType::number, "1e-8", "relative tolerance of the angular quadrature"},
      {"certify.strategies", ValueType::text_list, "goldstone_jaffe, deformed, thin_layer, symmetric_log",
       "families tried in order"},
      {"certify.sigmas", ValueType::number_list, "", "decay rates (empty: decades that fit the chart)"},
      {"certify.ns", ValueType::integer_list, "", "log-ramp scales (empty: powers of two that fit the chart)"},
      {"certify.s0", ValueType::number, "1", "plateau radius of the Macdonald profile"},
      {"certify.margin", ValueType::number, "3", "required |Q~| / error"},
      {"certify.budget_seconds", ValueType::number, "300", "wall-clock budget"},
      {"solver.tol", ValueType::number, "1e-10", "relative tolerance of the form quadratures"},
      {"solver.u_points", ValueType::integer, "24", "transverse Gauss points (a second rule of +8 checks it)"},
      {"solver.eigen_tol", ValueType::number, "1e-9", "eigensolver residual tolerance"},
      {"spectrum.m", ValueType::integer_list, "0, 1, 2", "angular momenta"},
      {"spectrum.k", ValueType::integer, "3", "eigenvalues per angular momentum"},
      {"spectrum.S", ValueType::number, "20", "Dirichlet truncation radius"},
      {"spectrum.h_s", ValueType::number, "0.1", "radial spacing"},
      {"spectrum.n_u", ValueType::integer, "31", "transverse interior nodes"},
      {"spectrum.levels", ValueType::integer, "1", "mesh halvings for the convergence table (1: none)"},
      {"counterexample.R", ValueType::number, "1", "cylinder radius (layer.a is the half-width)"},
      {"counterexample.S", ValueType::number_list, "10, 20, 40", "truncation lengths in units of R"},
      {"counterexample.h_s", ValueType::number, "0.1", "radial spacing of the full layer"},
      {"counterexample.n_u", ValueType::integer, "31", "transverse interior nodes of the full layer"},
      {"counterexample.radial_n", ValueType::integer, "400", "interior nodes of the coarsest radial grid"},
      {"counterexample.levels", ValueType::integer, "4", "radial grid halvings for extrapolation"},
      {"output.dir", ValueType::text, ".", "report directory (--out overrides)"},
  };
  return schema;
}

RunConfig RunConfig::defaults() { return parse(""); }

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') config_error(where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty() || section.find_first_of(" \t.=") != std::string::npos) config_error(where + "bad section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(where + "expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) config_error(where + "empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    if (key.find('.') == std::string::npos) config_error(where + "key '" + key + "' needs a section");
    if (cfg.user_.count(key)) config_error(where + "duplicate key '" + key + "'");
    if (const auto* spec = find_key(key)) {
      check_type(key, spec->type, value);
    } else if (key.rfind("surface.", 0) == 0) {
      to_number(key, value);  // surface parameters are numbers; names are checked against the entry later
    } else {
      config_error(where + "unknown key '" + key + "'");
    }
    cfg.user_[key] = value;
  }
  for (const auto& k : config_schema()) cfg.values_[k.key] = k.fallback;
  for (const auto& [k, v] : cfg.user_) cfg.values_[k] = v;
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) config_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) config_error("missing key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const { return to_number(key, raw(key)); }
int RunConfig::integer(const std::string& key) const { return to_integer(key, raw(key)); }
bool RunConfig::boolean(const std::string& key) const { return to_boolean(key, raw(key)); }
std::string RunConfig::text(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& x : split_list(raw(key))) out.push_back(to_number(key, x));
  return out;
}

std::vector<int> RunConfig::integers(const std::string& key) const {
  std::vector<int> out;
  for (const auto& x : split_list(raw(key))) out.push_back(to_integer(key, x));
  return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key) const { return split_list(raw(key)); }

std::map<std::string, double> RunConfig::surface_params() const {
  std::map<std::string, double> out;
  for (const auto& [k, v] : user_) {
    if (k.rfind("surface.", 0) == 0 && k != "surface.name") out[k.substr(8)] = to_number(k, v);
  }
  return out;
}

std::string defaults_text() {
  std::ostringstream out;
  std::string section;
  for (const auto& k : config_schema()) {
    const auto dot = k.key.find('.');
    const std::string sec = k.key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << '\n';
      out << '[' << sec << "]\n";
      section = sec;
    }
    out << "# " << k.help << " (" << to_string(k.type) << ")\n";
    out << k.key.substr(dot + 1) << " = " << k.fallback << '\n';
  }
  return out.str();
}

}  // namespace layerspec::cli
