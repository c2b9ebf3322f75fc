#pragma once

// Flat key=value configuration.
//
// Grammar, one directive per line:
//   key = value          key matches [A-Za-z0-9_.]+, value is free text
//   # comment            '#' starts a comment anywhere on a line
// Whitespace around key and value is trimmed. Blank lines are ignored.
// Duplicate keys are an error (they are always a typo in practice).
// Booleans accept true/false, yes/no, on/off, 1/0.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace caustic {

class Config {
 public:
  Config() = default;

  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      c.parse_line(line, origin, lineno);
    }
    return c;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    check_key(key, "<set>", 0);
    kv_[key] = value;
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    used_.insert(key);
    return it == kv_.end() ? def : it->second;
  }

  std::string req_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw error("config: missing required key " + key);
    used_.insert(key);
    return it->second;
  }

  double get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    used_.insert(key);
    return it == kv_.end() ? def : to_double(key, it->second);
  }

  double req_double(const std::string& key) const { return to_double(key, req_string(key)); }

  int get_int(const std::string& key, int def) const {
    auto it = kv_.find(key);
    used_.insert(key);
    return it == kv_.end() ? def : to_int(key, it->second);
  }

  int req_int(const std::string& key) const { return to_int(key, req_string(key)); }

  bool get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    used_.insert(key);
    return it == kv_.end() ? def : to_bool(key, it->second);
  }

  // keys present in the file that no getter ever consumed; a non-empty result
  // after settings are parsed means a misspelled or unsupported key
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
      out += k;
      out += " = ";
      out += v;
      out += '\n';
    }
    return out;
  }

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> used_;

  static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static void check_key(const std::string& key, const std::string& origin, int lineno) {
    bool ok = !key.empty();
    for (char ch : key)
      ok = ok && (std::isalnum((unsigned char)ch) || ch == '_' || ch == '.');
    if (!ok)
      throw error("config: bad key '" + key + "' at " + origin + ":" + std::to_string(lineno));
  }

  void parse_line(const std::string& raw, const std::string& origin, int lineno) {
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw error("config: expected key = value at " + origin + ":" + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    check_key(key, origin, lineno);
    if (kv_.count(key))
      throw error("config: duplicate key " + key + " at " + origin + ":" + std::to_string(lineno));
    kv_[key] = val;
  }

  static double to_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      double d = std::stod(v, &pos);
      if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw error("config: key " + key + " wants a number, got '" + v + "'");
  }

  static int to_int(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      long n = std::stol(v, &pos);
      if (trim(v.substr(pos)).empty() && n >= INT_MIN_SAFE && n <= INT_MAX_SAFE) return (int)n;
    } catch (const std::exception&) {
    }
    throw error("config: key " + key + " wants an integer, got '" + v + "'");
  }

  static bool to_bool(const std::string& key, const std::string& v) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw error("config: key " + key + " wants a boolean, got '" + v + "'");
  }

  static constexpr long INT_MIN_SAFE = -2147483647L;
  static constexpr long INT_MAX_SAFE = 2147483647L;
};

}  // namespace caustic
