#include "rsr/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "rsr/error.hpp"

namespace rsr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

double cell_value(const std::string& cell, const std::filesystem::path& path, std::size_t row) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::IoError, path.string() + ": bad number '" + cell + "' on data row " + std::to_string(row));
  }
  return v;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorKind::IoError, "format_double failed");
  return std::string(buf.data(), ptr);
}

void write_dataset_csv(const std::filesystem::path& path, const DataSet& data) {
  std::ofstream out = open_out(path);
  const Eigen::Index dim = data.dim();
  for (Eigen::Index j = 0; j < dim; ++j) out << (j ? "," : "") << 'x' << j;
  if (data.has_mask()) out << ",is_inlier";
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) out << (j ? "," : "") << format_double(data.points()(j, i));
    if (data.has_mask()) out << ',' << (data.mask()[static_cast<std::size_t>(i)] ? 1 : 0);
    out << '\n';
  }
  finish(out, path);
}

DataSet read_dataset_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::IoError, path.string() + ": empty file");
  const auto header = split(lines[0], ',');
  const bool has_mask = !header.empty() && header.back() == "is_inlier";
  const auto dim = static_cast<Eigen::Index>(header.size()) - (has_mask ? 1 : 0);
  if (dim < 1) throw Error(ErrorKind::IoError, path.string() + ": no coordinate columns");
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j)) {
      throw Error(ErrorKind::IoError, path.string() + ": expected column x" + std::to_string(j));
    }
  }
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  if (n == 0) throw Error(ErrorKind::IoError, path.string() + ": no data rows");
  Matrix pts(dim, n);
  std::vector<bool> mask;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cells = split(lines[static_cast<std::size_t>(i + 1)], ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::IoError, path.string() + ": wrong column count on data row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      pts(j, i) = cell_value(cells[static_cast<std::size_t>(j)], path, static_cast<std::size_t>(i));
    }
    if (has_mask) {
      const auto& flag = cells.back();
      if (flag != "0" && flag != "1") throw Error(ErrorKind::IoError, path.string() + ": is_inlier must be 0 or 1");
      mask.push_back(flag == "1");
    }
  }
  if (has_mask) return DataSet(std::move(pts), std::move(mask));
  return DataSet(std::move(pts));
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << 'c' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  finish(out, path);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw Error(ErrorKind::IoError, path.string() + ": need a header and at least one row");
  const auto cols = static_cast<Eigen::Index>(split(lines[0], ',').size());
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto cells = split(lines[static_cast<std::size_t>(i + 1)], ',');
    if (static_cast<Eigen::Index>(cells.size()) != cols) {
      throw Error(ErrorKind::IoError, path.string() + ": wrong column count on row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = cell_value(cells[static_cast<std::size_t>(j)], path, static_cast<std::size_t>(i));
    }
  }
  return m;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigInvalid, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ConfigInvalid, "config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw Error(ErrorKind::ConfigInvalid, "override '" + assignment + "' is not key=value");
  }
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::ConfigInvalid, "missing config key '" + key + "'");
  return it->second;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::ConfigInvalid, key + ": '" + text + "' is not a number");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::ConfigInvalid, key + ": '" + text + "' is not an integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw Error(ErrorKind::ConfigInvalid, key + ": '" + text + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& cell : split(text, ',')) {
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

}  // namespace rsr
