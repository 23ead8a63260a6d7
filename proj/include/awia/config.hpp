#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "awia/errors.hpp"

namespace awia::io {

// FNV-1a, used to fingerprint config text in manifests and checkpoints
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Flat key-value configuration with [section] headers; keys are addressed
// as "section.key". Physical inputs carry a unit suffix in the key itself
// (_um, _us, _ns, _MHz, ...) and the typed getters below enforce it.
class Config {
 public:
  static Config parse_text(const std::string& text) {
    Config c;
    c.text_ = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": empty section name");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      if (!section.empty()) key = section + "." + key;
      c.kv_[key] = val;
    }
    return c;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
  }

  std::string get(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const {
    return to_double(key, get(key));
  }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  long get_int(const std::string& key) const {
    double d = get_double(key);
    long v = static_cast<long>(d);
    if (static_cast<double>(v) != d)
      throw ConfigError("config: key '" + key + "' is not an integer");
    return v;
  }
  long get_int(const std::string& key, long dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    return static_cast<std::uint64_t>(get_int(key));
  }

  bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string& v = get(key);
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean");
  }

  std::vector<double> get_doubles(const std::string& key) const {
    std::istringstream ss(get(key));
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(to_double(key, tok));
    if (out.empty()) throw ConfigError("config: key '" + key + "' is empty");
    return out;
  }

  // unit-suffix enforced getters; all return SI
  double get_um(const std::string& key) const {
    return suffixed(key, "_um") * 1e-6;
  }
  double get_us(const std::string& key) const {
    return suffixed(key, "_us") * 1e-6;
  }
  double get_ns(const std::string& key) const {
    return suffixed(key, "_ns") * 1e-9;
  }
  double get_mhz(const std::string& key) const {  // -> Hz
    return suffixed(key, "_MHz") * 1e6;
  }
  std::vector<double> get_um_list(const std::string& key) const {
    require_suffix(key, "_um");
    auto v = get_doubles(key);
    for (auto& x : v) x *= 1e-6;
    return v;
  }

  const std::string& text() const { return text_; }
  std::uint64_t hash() const { return fnv1a64(text_); }

 private:
  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static double to_double(const std::string& key, const std::string& v) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double d;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                        v + "'");
    }
    if (pos != v.size())
      throw ConfigError("config: key '" + key + "' has trailing junk in '" +
                        v + "'");
    return d;
  }

  static void require_suffix(const std::string& key, const std::string& suf) {
    if (key.size() < suf.size() ||
        key.compare(key.size() - suf.size(), suf.size(), suf) != 0)
      throw ConfigError("config: key '" + key + "' must carry the " + suf +
                        " unit suffix");
  }

  double suffixed(const std::string& key, const std::string& suf) const {
    require_suffix(key, suf);
    return get_double(key);
  }

  std::map<std::string, std::string> kv_;
  std::string text_;
};

}  // namespace awia::io
