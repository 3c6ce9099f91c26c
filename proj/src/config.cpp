#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "twist/io.hpp"

namespace twist {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParameterError("config key '" + key + "': '" + text + "' is not a real number");
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (k.empty()) throw ParseError("empty key", line_no);
    if (cfg.values_.count(k)) throw ParseError("duplicate key '" + k + "'", line_no);
    cfg.values_[k] = v;
    cfg.lines_[k] = line_no;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  const auto text = get(key);
  if (!text) return fallback;
  long long value = 0;
  const char* last = text->data() + text->size();
  auto [ptr, ec] = std::from_chars(text->data(), last, value);
  if (ec != std::errc() || ptr != last)
    throw ParameterError("config key '" + key + "': '" + *text + "' is not an integer");
  return value;
}

double KeyValueConfig::get_real(const std::string& key, double fallback) const {
  const auto text = get(key);
  return text ? to_real(key, *text) : fallback;
}

bool KeyValueConfig::get_flag(const std::string& key, bool fallback) const {
  const auto text = get(key);
  if (!text) return fallback;
  std::string v = *text;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("config key '" + key + "': '" + *text + "' is not a flag");
}

std::vector<double> KeyValueConfig::get_reals(const std::string& key) const {
  const auto text = get(key);
  std::vector<double> out;
  if (!text) return out;
  std::size_t start = 0;
  while (start <= text->size()) {
    const auto comma = text->find(',', start);
    const std::string item = trim(text->substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ParameterError("config key '" + key + "': empty list item");
    out.push_back(to_real(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

}  // namespace twist
