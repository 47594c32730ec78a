#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace weakperf {

/// Line-oriented `key = value` settings grouped under `[section]` headers.
/// Keys before any header belong to section "". `#` and `;` start comments.
class Config {
 public:
  using Schema = std::map<std::string, std::set<std::string>>;

  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  /// Rejects any section or key not listed in the schema.
  void check_schema(const Schema& schema) const;

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::string choice(const std::string& section, const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) const;
  double real(const std::string& section, const std::string& key, double fallback, double lo, double hi) const;
  long integer(const std::string& section, const std::string& key, long fallback, long lo, long hi) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& section, const std::string& key, const std::vector<double>& fallback,
                            double lo, double hi) const;

  const std::map<std::string, std::map<std::string, std::string>>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& section, const std::string& key) const;
  std::string where(const std::string& section, const std::string& key) const;

  std::string origin_ = "<config>";
  std::map<std::string, std::map<std::string, std::string>> entries_;
};

}  // namespace weakperf
