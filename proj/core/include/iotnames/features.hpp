#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "iotnames/label.hpp"

namespace iotnames {

/// Dense row-major sample matrix with one label per row.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<Label> labels;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows(rows), cols(cols), values(rows * cols, 0.0), labels(rows, Label::Negative) {}

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }

  std::size_t count(Label label) const;

  /// Throws InputError on size mismatch or non-finite entries.
  void validate() const;
};

/// Rows `indices` of `m`, in that order.
FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> indices);

/// Binary matrix file: 8-byte magic "IOTNVEC1", uint32 rows, uint32 cols
/// (little-endian), then rows*cols little-endian IEEE-754 doubles, row-major.
inline constexpr char kMatrixMagic[8] = {'I', 'O', 'T', 'N', 'V', 'E', 'C', '1'};

void write_matrix(std::ostream& out, std::size_t rows, std::size_t cols, std::span<const double> values);

struct MatrixFile {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

MatrixFile read_matrix(std::istream& in);

}  // namespace iotnames
