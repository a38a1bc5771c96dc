#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rydcav {

// Flat key-value configuration.
//
// One `key = value` pair per line. Everything after '#' is a comment and
// blank lines are ignored. Keys are case-sensitive; a repeated key is an
// error. Numbers are parsed without locale (dot decimal).
class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text, std::string source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  void set(std::string key, std::string value);
  void set(std::string key, double value);

  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  // Whitespace- or comma-separated list of numbers.
  std::vector<double> get_doubles(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return values_;
  }
  const std::string& source() const { return source_; }

  // Serializes back to the line format, keys sorted.
  std::string to_text() const;

 private:
  const std::string& raw(std::string_view key) const;

  std::map<std::string, std::string, std::less<>> values_;
  std::string source_ = "<string>";
};

// Locale-independent number parsing/formatting shared with the CSV layer.
double parse_double(std::string_view text);
std::string format_double(double value);

}  // namespace rydcav
