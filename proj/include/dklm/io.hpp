#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dklm/metrics.hpp"

namespace dklm {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_cell(std::string_view cell, size_t row, size_t col) {
  cell = trim(cell);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw IoError("csv parse error at row " + std::to_string(row + 1) + ", col " +
                  std::to_string(col + 1) + ": '" + std::string(cell) +
                  "' is not numeric");
  }
  return value;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      ++row;
      continue;
    }
    std::vector<double> cells;
    size_t start = 0, col = 0;
    while (true) {
      size_t comma = line.find(',', start);
      std::string_view cell(line.data() + start,
                            (comma == std::string::npos ? line.size() : comma) - start);
      cells.push_back(parse_cell(cell, row, col));
      ++col;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && cells.size() != rows.front().size()) {
      throw IoError("csv parse error at row " + std::to_string(row + 1) +
                    ": expected " + std::to_string(rows.front().size()) +
                    " columns, got " + std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
    ++row;
  }
  if (rows.empty()) throw IoError("csv file is empty: " + path);
  return rows;
}

}  // namespace detail

/// Row-per-point CSV loaded into the D x N column-point convention.
/// With `labeled`, the final column holds integer ground-truth labels.
struct LoadedData {
  Matrix x;
  std::optional<LabelVector> truth;
};

inline LoadedData load_csv(const std::string& path, bool labeled = false) {
  auto rows = detail::read_rows(path);
  const size_t n = rows.size();
  size_t cols = rows.front().size();
  if (labeled && cols < 2) {
    throw IoError("labeled csv needs at least 2 columns: " + path);
  }
  const size_t d = labeled ? cols - 1 : cols;
  LoadedData out;
  out.x.resize(static_cast<Index>(d), static_cast<Index>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      out.x(static_cast<Index>(j), static_cast<Index>(i)) = rows[i][j];
    }
  }
  if (labeled) {
    LabelVector truth;
    truth.labels.resize(n);
    int maxlab = 0;
    for (size_t i = 0; i < n; ++i) {
      double raw = rows[i][cols - 1];
      int lab = static_cast<int>(std::lround(raw));
      if (std::abs(raw - lab) > 1e-9 || lab < 0) {
        throw IoError("label column at row " + std::to_string(i + 1) +
                      " is not a nonnegative integer");
      }
      truth.labels[i] = lab;
      maxlab = std::max(maxlab, lab);
    }
    truth.k = maxlab + 1;
    out.truth = std::move(truth);
  }
  return out;
}

/// Writes D x N data back as row-per-point CSV; values use shortest
/// round-trip formatting so load(save(m)) == m exactly. An optional label
/// vector appends a final integer column.
inline void save_csv(const Matrix& m, const std::string& path,
                     const LabelVector* labels = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  for (Index i = 0; i < m.cols(); ++i) {
    for (Index j = 0; j < m.rows(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(m(j, i));
    }
    if (labels) out << ',' << labels->labels[static_cast<size_t>(i)];
    out << '\n';
  }
}

/// Matrix dump format: a "# rows cols symmetric|general" header line
/// followed by CSV rows.
inline void save_matrix(const Matrix& m, const std::string& path, bool symmetric) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << "# " << m.rows() << ' ' << m.cols() << ' '
      << (symmetric ? "symmetric" : "general") << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
}

inline Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string header;
  if (!std::getline(in, header) || header.empty() || header[0] != '#') {
    throw IoError("matrix file missing '# rows cols kind' header: " + path);
  }
  std::istringstream hs(header.substr(1));
  Index rows = 0, cols = 0;
  std::string kind;
  if (!(hs >> rows >> cols >> kind) || rows < 1 || cols < 1) {
    throw IoError("malformed matrix header: " + header);
  }
  Matrix m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw IoError("matrix file truncated: " + path);
    size_t start = 0;
    for (Index j = 0; j < cols; ++j) {
      size_t comma = line.find(',', start);
      std::string_view cell(line.data() + start,
                            (comma == std::string::npos ? line.size() : comma) - start);
      m(i, j) = detail::parse_cell(cell, static_cast<size_t>(i) + 1,
                                   static_cast<size_t>(j));
      start = comma == std::string::npos ? line.size() : comma + 1;
    }
  }
  return m;
}

/// Single-column label CSV.
inline void save_labels(const LabelVector& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  for (int lab : labels.labels) out << lab << '\n';
}

inline LabelVector load_labels(const std::string& path) {
  auto rows = detail::read_rows(path);
  LabelVector v;
  v.labels.resize(rows.size());
  int maxlab = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) {
      throw IoError("label file must have one column: " + path);
    }
    int lab = static_cast<int>(std::lround(rows[i][0]));
    if (std::abs(rows[i][0] - lab) > 1e-9 || lab < 0) {
      throw IoError("label file row " + std::to_string(i + 1) +
                    " is not a nonnegative integer");
    }
    v.labels[i] = lab;
    maxlab = std::max(maxlab, lab);
  }
  v.k = maxlab + 1;
  return v;
}

}  // namespace dklm
