#include "weakperf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "weakperf/errors.hpp"

namespace weakperf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ConfigError(where + ": '" + text + "' is not a finite number");
  }
  return v;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(at + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(at + ": empty key");
    if (cfg.has(section, key)) throw ConfigError(at + ": duplicate key '" + key + "'");
    cfg.entries_[section][key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  entries_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const std::string* Config::find(const std::string& section, const std::string& key) const {
  auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::string Config::where(const std::string& section, const std::string& key) const {
  return origin_ + ": [" + section + "] " + key;
}

void Config::check_schema(const Schema& schema) const {
  for (const auto& [section, keys] : entries_) {
    auto s = schema.find(section);
    if (s == schema.end()) throw ConfigError(origin_ + ": unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      if (!s->second.count(key)) throw ConfigError(where(section, key) + ": unknown key");
    }
  }
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  const auto* v = find(section, key);
  return v ? *v : fallback;
}

std::string Config::choice(const std::string& section, const std::string& key, const std::string& fallback,
                           const std::vector<std::string>& allowed) const {
  const std::string v = text(section, key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(where(section, key) + ": '" + v + "' is not one of " + list);
  }
  return v;
}

double Config::real(const std::string& section, const std::string& key, double fallback, double lo,
                    double hi) const {
  const auto* v = find(section, key);
  const double x = v ? to_real(*v, where(section, key)) : fallback;
  if (!(x >= lo && x <= hi)) {
    std::ostringstream msg;
    msg << where(section, key) << ": " << x << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(msg.str());
  }
  return x;
}

long Config::integer(const std::string& section, const std::string& key, long fallback, long lo, long hi) const {
  const auto* v = find(section, key);
  long x = fallback;
  if (v) {
    std::size_t used = 0;
    try {
      x = std::stol(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->size()) throw ConfigError(where(section, key) + ": '" + *v + "' is not an integer");
  }
  if (x < lo || x > hi) {
    throw ConfigError(where(section, key) + ": " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return x;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(where(section, key) + ": '" + *v + "' is not a boolean");
}

std::vector<double> Config::reals(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback, double lo, double hi) const {
  const auto* v = find(section, key);
  std::vector<double> out;
  if (!v) {
    out = fallback;
  } else {
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(trim(item), where(section, key)));
    if (out.empty()) throw ConfigError(where(section, key) + ": empty list");
  }
  for (double x : out) {
    if (!(x >= lo && x <= hi)) {
      std::ostringstream msg;
      msg << where(section, key) << ": " << x << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(msg.str());
    }
  }
  return out;
}

}  // namespace weakperf
