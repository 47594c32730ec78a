#include "weakperf/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "weakperf/errors.hpp"

namespace weakperf {

std::string format_number(long double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

nlohmann::json json_number(long double v) {
  if (v == 0) return 0.0;
  const long double a = std::fabs(v);
  if (std::isfinite(v) && a >= std::numeric_limits<double>::min() && a <= std::numeric_limits<double>::max()) {
    return double(v);
  }
  return format_number(v);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  write(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv row has the wrong number of fields");
  write(fields);
  ++rows_;
}

void CsvWriter::write(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    if (i) out_ << ',';
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out_ << f;
    } else {
      out_ << '"';
      for (char ch : f) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    }
  }
  out_ << '\n';
}

nlohmann::json make_summary(const std::string& command, const std::string& precision) {
  nlohmann::json j;
  j["command"] = command;
  j["precision"] = precision;
  return j;
}

void write_summary(const nlohmann::json& summary, const std::string& path, std::ostream& stdout_stream) {
  if (path == "-") {
    stdout_stream << summary.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write summary to '" + path + "'");
  out << summary.dump(2) << '\n';
}

}  // namespace weakperf
