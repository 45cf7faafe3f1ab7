#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blockrelax/instance_gen.hpp"
#include "blockrelax/types.hpp"

namespace blockrelax {

/// Plain-text instance container.
///
///     # blockrelax-instance v1
///     key: value            (header, one field per line, order preserved)
///     ...
///     [matrix NAME ROWS COLS]
///     v11,v12,...           (one row per line, 17 significant digits)
///     ...
///
/// Index lists in the header are 1-based and comma separated.
class InstanceContainer {
 public:
  void set(const std::string& key, std::string value);
  [[nodiscard]] std::optional<std::string> find(const std::string& key) const;
  /// Throws FormatError if missing.
  [[nodiscard]] const std::string& get(const std::string& key) const;

  void set_matrix(const std::string& name, Matrix value);
  [[nodiscard]] const Matrix& matrix(const std::string& name) const;
  [[nodiscard]] bool has_matrix(const std::string& name) const;

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& header() const { return header_; }
  [[nodiscard]] const std::vector<std::pair<std::string, Matrix>>& matrices() const { return matrices_; }

  void write(std::ostream& os) const;
  static InstanceContainer read(std::istream& is);

  void save(const std::filesystem::path& path) const;
  static InstanceContainer load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> header_;
  std::vector<std::pair<std::string, Matrix>> matrices_;
};

/// Shortest decimal text that round-trips (at most 17 significant digits).
std::string format_double(double v);
double parse_double(const std::string& text);

std::string format_index_list(const IndexList& zero_based);
IndexList parse_index_list(const std::string& one_based_csv);
std::string format_double_list(const std::vector<double>& values);
std::vector<double> parse_double_list(const std::string& csv);

InstanceContainer to_container(const RelaxedInstance& inst, const GenConfig& cfg);
/// Rebuilds an instance (and the GenConfig recorded in the header) from a container.
std::pair<RelaxedInstance, GenConfig> instance_from_container(const InstanceContainer& c);

}  // namespace blockrelax
