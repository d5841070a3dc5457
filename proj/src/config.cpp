#include "jiofilt/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jiofilt/scenario.hpp"

namespace jio {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return from_string(buffer.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream is(text);
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                               " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(line_no));
    }
    kv.entries_[key] = value;
  }
  return kv;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
  }
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  std::istringstream is(it->second);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      out.push_back(std::stod(trim(item)));
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' has a non-numeric entry: " + item);
    }
  }
  if (out.empty()) {
    throw ConfigError("config: key '" + key + "' is an empty list");
  }
  return out;
}

ScenarioConfig scenario_from_config(const KeyValueConfig& kv) {
  ScenarioConfig cfg;
  cfg.users = static_cast<int>(kv.get_int("scenario.users", cfg.users));
  cfg.chips = static_cast<int>(kv.get_int("scenario.chips", cfg.chips));
  cfg.channel_span = static_cast<int>(kv.get_int("scenario.channel_span", cfg.channel_span));
  cfg.paths = static_cast<int>(kv.get_int("scenario.paths", cfg.paths));
  cfg.path_powers_db = kv.get_double_list("scenario.path_powers_db", cfg.path_powers_db);
  cfg.spacing_min = static_cast<int>(kv.get_int("scenario.spacing_min", cfg.spacing_min));
  cfg.spacing_max = static_cast<int>(kv.get_int("scenario.spacing_max", cfg.spacing_max));
  cfg.isi_span = static_cast<int>(kv.get_int("scenario.isi_span", cfg.isi_span));
  cfg.snr_db = kv.get_double("scenario.snr_db", cfg.snr_db);
  cfg.power_std_db = kv.get_double("scenario.power_std_db", cfg.power_std_db);
  const std::string fading = kv.get_string("scenario.fading", "static");
  if (fading == "static") {
    cfg.fading = FadingModel::static_channel;
  } else if (fading == "clarke") {
    cfg.fading = FadingModel::clarke;
  } else {
    throw ConfigError("config: scenario.fading must be 'static' or 'clarke'");
  }
  cfg.doppler = kv.get_double("scenario.doppler", cfg.doppler);
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("scenario.seed", 1));
  cfg.validate();
  return cfg;
}

}  // namespace jio
