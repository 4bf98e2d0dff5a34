#pragma once

#include <map>
#include <string>
#include <vector>

namespace layerspec::cli {

enum class ValueType { number, integer, boolean, text, number_list, integer_list, text_list };
const char* to_string(ValueType t) noexcept;

struct KeySpec {
  std::string key;  // section.name
  ValueType type = ValueType::number;
  std::string fallback;  // default in config syntax; empty for "unset"
  std::string help;
};

/// Fixed keys. Surface parameters (surface.<param>) are checked separately
/// against the selected catalog entry.
const std::vector<KeySpec>& config_schema();

/// Parsed and validated configuration. Values keep their text form and are
/// converted on access; every key in the schema is present after parsing.
class RunConfig {
 public:
  /// Parses "key = value" lines, "# comments" and "[section]" headers that
  /// prefix the following undotted keys (dotted keys are always absolute). Throws Error(config) on syntax errors,
  /// unknown keys, duplicates and values of the wrong type.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  static RunConfig defaults();

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  bool set_by_user(const std::string& key) const { return user_.count(key) > 0; }

  /// surface.<param> entries given by the user, without the prefix.
  std::map<std::string, double> surface_params() const;
  /// Every resolved key with its text value, sorted.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> user_;
  const std::string& raw(const std::string& key) const;
};

/// All defaults in config syntax, grouped by section with help comments.
std::string defaults_text();

}  // namespace layerspec::cli
