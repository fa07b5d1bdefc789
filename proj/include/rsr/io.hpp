#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// One point per row: header x0,...,x{D-1}, plus a trailing is_inlier column
/// (0/1) when the dataset carries a mask.
void write_dataset_csv(const std::filesystem::path& path, const DataSet& data);
DataSet read_dataset_csv(const std::filesystem::path& path);

/// Plain numeric matrix, one matrix row per line, header c0,...,c{cols-1}.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Flat `key = value` text; '#' starts a comment. Later keys win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Applies one `key=value` override. ConfigInvalid when '=' is missing.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Converters used by the config layer; all throw ConfigInvalid.
double parse_double(const std::string& key, const std::string& text);
long long parse_int(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<std::string> split_list(const std::string& text);

}  // namespace rsr
