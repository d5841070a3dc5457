#ifndef JIOFILT_CONFIG_HPP
#define JIOFILT_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace jio {

struct ScenarioConfig;

/// Flat `key = value` configuration file. Lines starting with '#' and blank
/// lines are ignored; values keep their raw text until a typed getter runs.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Builds a ScenarioConfig from `scenario.*` keys, using defaults for keys
/// that are absent.
ScenarioConfig scenario_from_config(const KeyValueConfig& kv);

}  // namespace jio

#endif  // JIOFILT_CONFIG_HPP
