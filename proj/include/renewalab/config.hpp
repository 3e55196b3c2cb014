#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "renewalab/core.hpp"

namespace renewalab {

/// Plain-text experiment configuration: one `key = value` per line, '#'
/// comments, dotted lowercase keys. Vectors and matrices are whitespace- or
/// comma-separated scalar lists (matrices row-major).
class Config {
public:
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };

  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
      cfg.set(key, value, lineno);
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  void set(const std::string& key, const std::string& value, int line = 0) {
    for (auto& e : entries_)
      if (e.key == key) {
        e.value = value;
        e.line = line;
        return;
      }
    entries_.push_back({key, value, line});
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  std::string get_string(const std::string& key) const { return require(key).value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  double get_real(const std::string& key) const { return to_real(require(key)); }
  double get_real(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? to_real(*e) : fallback;
  }

  std::int64_t get_int(const std::string& key) const { return to_int(require(key)); }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const Entry* e = find(key);
    return e ? to_int(*e) : fallback;
  }

  std::vector<double> get_reals(const std::string& key) const { return to_reals(require(key)); }
  std::vector<double> get_reals(const std::string& key, const std::vector<double>& fallback) const {
    const Entry* e = find(key);
    return e ? to_reals(*e) : fallback;
  }

  Vec get_vec(const std::string& key) const {
    const auto v = get_reals(key);
    return Eigen::Map<const Vec>(v.data(), v.size());
  }

  Mat get_mat(const std::string& key, int rows, int cols) const {
    const Entry& e = require(key);
    const auto v = to_reals(e);
    if (int(v.size()) != rows * cols)
      throw std::runtime_error(where(e) + ": expected " + std::to_string(rows * cols) +
                               " entries (row-major), got " + std::to_string(v.size()));
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = v[size_t(i * cols + j)];
    return m;
  }

  /// Rejects unknown keys and reports missing required ones, with lines.
  void validate(const std::set<std::string>& allowed, const std::set<std::string>& required) const {
    for (const auto& e : entries_)
      if (!allowed.count(e.key))
        throw std::runtime_error(where(e) + ": unknown key '" + e.key + "'");
    for (const auto& k : required)
      if (!has(k)) throw std::runtime_error(origin_ + ": missing required key '" + k + "'");
  }

  /// Canonical text for hashing: sorted `key=value` lines.
  std::string canonical_text() const {
    std::vector<std::string> lines;
    lines.reserve(entries_.size());
    for (const auto& e : entries_) lines.push_back(e.key + "=" + e.value);
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  const Entry* find(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }

  const Entry& require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw std::runtime_error(origin_ + ": missing required key '" + key + "'");
    return *e;
  }

  std::string where(const Entry& e) const { return origin_ + ":" + std::to_string(e.line); }

  double to_real(const Entry& e) const {
    try {
      size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(where(e) + ": cannot parse real from '" + e.value + "'");
    }
  }

  std::int64_t to_int(const Entry& e) const {
    try {
      size_t pos = 0;
      const long long v = std::stoll(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error(where(e) + ": cannot parse integer from '" + e.value + "'");
    }
  }

  std::vector<double> to_reals(const Entry& e) const {
    std::string s = e.value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      try {
        size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::runtime_error(where(e) + ": cannot parse real list entry '" + tok + "'");
      }
    }
    if (out.empty()) throw std::runtime_error(where(e) + ": empty list");
    return out;
  }

  std::vector<Entry> entries_;
  std::string origin_ = "<empty>";
};

/// FNV-1a hash of the canonical config text.
inline std::uint64_t config_hash(const Config& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : cfg.canonical_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace renewalab
