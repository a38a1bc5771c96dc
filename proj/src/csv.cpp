#include "rydcav/csv.hpp"

#include "rydcav/config.hpp"
#include "rydcav/errors.hpp"

namespace rydcav {

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::field(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for (char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidInput("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_double(row.at(c)));
  return out;
}

CsvTable read_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string fieldbuf;
  bool quoted = false;
  bool any = false;
  auto flush_row = [&] {
    row.push_back(std::move(fieldbuf));
    fieldbuf.clear();
    if (table.header.empty()) {
      table.header = std::move(row);
    } else {
      table.rows.push_back(std::move(row));
    }
    row.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          fieldbuf += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fieldbuf += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(fieldbuf));
      fieldbuf.clear();
      any = true;
    } else if (c == '\n') {
      flush_row();
    } else if (c != '\r') {
      fieldbuf += c;
      any = true;
    }
  }
  if (any || !fieldbuf.empty()) flush_row();
  return table;
}

}  // namespace rydcav
