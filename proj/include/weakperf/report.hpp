#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace weakperf {

/// 17 significant digits, enough to round-trip a double.
std::string format_number(long double v);

/// JSON number when it fits a double without underflow, else the decimal text.
nlohmann::json json_number(long double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  std::size_t rows() const { return rows_; }

 private:
  void write(const std::vector<std::string>& fields);
  std::ostream& out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

/// Summary skeleton shared by every command.
nlohmann::json make_summary(const std::string& command, const std::string& precision);

/// Writes pretty JSON to path ("-" for the given stream).
void write_summary(const nlohmann::json& summary, const std::string& path, std::ostream& stdout_stream);

}  // namespace weakperf
