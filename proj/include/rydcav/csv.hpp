#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rydcav {

// Minimal RFC-4180 style writer: comma separated, LF line ends, numbers in
// shortest round-trip form without locale. Fields are quoted only when they
// contain a comma, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

// Parsed CSV table, used by tests and the oracle checks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

CsvTable read_csv(std::string_view text);

}  // namespace rydcav
