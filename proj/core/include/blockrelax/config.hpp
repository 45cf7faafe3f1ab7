#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace blockrelax {

/// Flat `key=value` configuration. Blank lines and lines starting with `#`
/// are ignored; a key may repeat, and its values (in file order) form a grid
/// axis. A single value may also list several entries separated by commas
/// for keys that take lists (see `list`).
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is);
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  void add(const std::string& key, const std::string& value);
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] bool has(const std::string& key) const;
  /// All values for `key` in order of appearance.
  [[nodiscard]] std::vector<std::string> values(const std::string& key) const;
  /// The single value for `key`; throws FormatError if it repeats.
  [[nodiscard]] std::optional<std::string> single(const std::string& key) const;

  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

  /// Values of a repeated key, each split on commas and flattened.
  [[nodiscard]] std::vector<std::string> list(const std::string& key) const;

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::int64_t parse_int(const std::string& text);
std::uint64_t parse_u64(const std::string& text);
bool parse_bool(const std::string& text);

}  // namespace blockrelax
