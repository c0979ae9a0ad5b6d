#pragma once

#include "nlps/common/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace nlps::harness {

/// Scenario files are lines of `dotted.key = value`, `# comments` and
/// `include relative/path.cfg`. Keys from an include can be overridden by the
/// including file; a key repeated within one file is an error.
struct ConfigEntry {
  std::string value;
  std::string file;
  int line = 0;

  std::string where() const { return file + ":" + std::to_string(line); }
};

class ConfigTree {
 public:
  static constexpr int kMaxIncludeDepth = 16;

  static ConfigTree load(const std::filesystem::path& path) {
    ConfigTree tree;
    tree.load_file(path, 0);
    return tree;
  }

  static ConfigTree parse(const std::string& text, const std::string& name = "<string>",
                          const std::filesystem::path& base = std::filesystem::current_path()) {
    ConfigTree tree;
    std::istringstream in(text);
    tree.parse_stream(in, name, base, 0);
    return tree;
  }

  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value, std::string file = "<override>", int line = 0) {
    entries_[key] = {std::move(value), std::move(file), line};
  }

  /// Canonical text: one `key = value` per line in key order.
  std::string emit() const {
    std::string out;
    for (const auto& [k, e] : entries_) out += k + " = " + e.value + "\n";
    return out;
  }

 private:
  void load_file(const std::filesystem::path& path, int depth) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    parse_stream(in, path.string(), path.parent_path(), depth);
  }

  void parse_stream(std::istream& in, const std::string& name, const std::filesystem::path& base, int depth) {
    if (depth > kMaxIncludeDepth) throw ConfigError(name + ": include nesting deeper than " + std::to_string(kMaxIncludeDepth));
    std::map<std::string, int> seen;
    std::string raw;
    for (int line = 1; std::getline(in, raw); ++line) {
      const std::string where = name + ":" + std::to_string(line);
      std::string text = trim(raw.substr(0, raw.find('#')));
      if (text.empty()) continue;
      if (text.rfind("include", 0) == 0 && (text.size() == 7 || std::isspace(static_cast<unsigned char>(text[7])))) {
        const auto target = trim(text.substr(7));
        if (target.empty()) throw ConfigError(where + ": include needs a path");
        load_file(base / target, depth + 1);
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + text + "'");
      const auto key = trim(text.substr(0, eq));
      if (!valid_key(key)) throw ConfigError(where + ": malformed key '" + key + "'");
      const auto [it, fresh] = seen.emplace(key, line);
      if (!fresh) throw ConfigError(where + ": key '" + key + "' already set at line " + std::to_string(it->second));
      entries_[key] = {trim(text.substr(eq + 1)), name, line};
    }
  }

  static bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.' || key.find("..") != std::string::npos) return false;
    for (char c : key)
      if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
        return false;
    return true;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

  std::map<std::string, ConfigEntry> entries_;
};

/// Typed value conversion with errors naming the key and its position.
namespace value {

inline ConfigError bad(const std::string& key, const ConfigEntry& e, const std::string& what) {
  return ConfigError(e.where() + ": key '" + key + "': " + what + ", got '" + e.value + "'");
}

inline double to_double(const std::string& key, const ConfigEntry& e) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) throw bad(key, e, "expected a number");
  return v;
}

inline long long to_integer(const std::string& key, const ConfigEntry& e) {
  long long v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw bad(key, e, "expected an integer");
  return v;
}

inline int to_int(const std::string& key, const ConfigEntry& e) {
  const auto v = to_integer(key, e);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) throw bad(key, e, "integer out of range");
  return static_cast<int>(v);
}

inline std::uint64_t to_seed(const std::string& key, const ConfigEntry& e) {
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw bad(key, e, "expected a nonnegative integer");
  return v;
}

inline bool to_bool(const std::string& key, const ConfigEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw bad(key, e, "expected true or false");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    items.push_back(b == std::string::npos ? "" : item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return items;
}

template <typename T, typename Convert>
std::vector<T> to_list(const std::string& key, const ConfigEntry& e, Convert convert) {
  std::vector<T> out;
  if (e.value.empty()) return out;
  for (const auto& item : split_list(e.value)) {
    ConfigEntry sub = e;
    sub.value = item;
    out.push_back(convert(key, sub));
  }
  return out;
}

/// Shortest text that parses back to the same double.
inline std::string format(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + f(items[i]);
  return out;
}

}  // namespace value
}  // namespace nlps::harness
