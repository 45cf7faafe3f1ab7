#include "blockrelax/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "blockrelax/container.hpp"
#include "blockrelax/types.hpp"

namespace blockrelax {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw FormatError("bad integer '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw FormatError("bad unsigned integer '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw FormatError("bad boolean '" + text + "'");
}

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.add(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config '" + path.string() + "'");
  return parse(is);
}

void KeyValueConfig::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
  entries_.emplace_back(key, value);
}

bool KeyValueConfig::has(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

std::vector<std::string> KeyValueConfig::values(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

std::optional<std::string> KeyValueConfig::single(const std::string& key) const {
  const auto vs = values(key);
  if (vs.empty()) return std::nullopt;
  if (vs.size() > 1) throw FormatError("config key '" + key + "' must not repeat");
  return vs.front();
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return single(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = single(key);
  return v ? parse_double(*v) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto v = single(key);
  return v ? parse_int(*v) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = single(key);
  return v ? parse_u64(*v) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = single(key);
  return v ? parse_bool(*v) : fallback;
}

std::vector<std::string> KeyValueConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& v : values(key)) {
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

}  // namespace blockrelax
