#include "rydcav/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rydcav/errors.hpp"

namespace rydcav {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

void Config::set(std::string key, std::string value) {
  values_.insert_or_assign(std::move(key), std::move(value));
}

void Config::set(std::string key, double value) { set(std::move(key), format_double(value)); }

const std::string& Config::raw(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
  }
  return it->second;
}

std::string Config::get_string(std::string_view key) const { return raw(key); }

std::string Config::get_string(std::string_view key, std::string fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(std::string_view key) const {
  try {
    return parse_double(raw(key));
  } catch (const ConfigError& e) {
    if (!has(key)) throw;
    throw ConfigError(source_ + ": key '" + std::string(key) + "': " + e.what());
  }
}

double Config::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(std::string_view key) const {
  const std::string& s = raw(key);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(source_ + ": key '" + std::string(key) + "': not an integer: '" + s + "'");
  }
  return value;
}

long long Config::get_int(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(source_ + ": key '" + std::string(key) + "': not a boolean: '" + s + "'");
}

std::vector<double> Config::get_doubles(std::string_view key) const {
  std::string s = raw(key);
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::vector<double> out;
  std::istringstream ss(s);
  std::string token;
  while (ss >> token) {
    try {
      out.push_back(parse_double(token));
    } catch (const ConfigError& e) {
      throw ConfigError(source_ + ": key '" + std::string(key) + "': " + e.what());
    }
  }
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace rydcav
