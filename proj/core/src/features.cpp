#include "iotnames/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "iotnames/error.hpp"

namespace iotnames {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw InputError("matrix file truncated in header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::size_t FeatureMatrix::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void FeatureMatrix::validate() const {
  if (values.size() != rows * cols) throw InputError("feature matrix value count does not match its shape");
  if (labels.size() != rows) throw InputError("feature matrix label count does not match its rows");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("feature matrix has non-finite entries");
  }
}

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> indices) {
  FeatureMatrix out(indices.size(), m.cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = m.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
    out.labels[r] = m.labels[indices[r]];
  }
  return out;
}

void write_matrix(std::ostream& out, std::size_t rows, std::size_t cols, std::span<const double> values) {
  if (rows > std::numeric_limits<std::uint32_t>::max() || cols > std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("matrix too large for the file format");
  }
  if (values.size() != rows * cols) throw InputError("matrix value count does not match its shape");
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  put_u32(out, static_cast<std::uint32_t>(rows));
  put_u32(out, static_cast<std::uint32_t>(cols));
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(b, 8);
  }
}

MatrixFile read_matrix(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMatrixMagic, 8) != 0) {
    throw InputError("not a name-vector matrix file");
  }
  MatrixFile m;
  m.rows = get_u32(in);
  m.cols = get_u32(in);
  m.values.resize(m.rows * m.cols);
  for (auto& v : m.values) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw InputError("matrix file truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v = std::bit_cast<double>(bits);
  }
  return m;
}

}  // namespace iotnames
