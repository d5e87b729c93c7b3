#pragma once

// Token-level helpers shared by the model serializers.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iotnames/csv.hpp"
#include "iotnames/error.hpp"

namespace iotnames::serial {

inline std::string token(std::istream& in) {
  std::string t;
  if (!(in >> t)) throw InputError("model file truncated");
  return t;
}

inline void expect(std::istream& in, const std::string& keyword) {
  auto t = token(in);
  if (t != keyword) throw InputError("model file: expected '" + keyword + "', found '" + t + "'");
}

inline double real(std::istream& in) {
  auto t = token(in);
  if (t == "nan") throw InputError("model file: NaN parameter");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) throw InputError("model file: bad number '" + t + "'");
  return v;
}

template <typename T = std::size_t>
T integer(std::istream& in) {
  auto t = token(in);
  T v{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) throw InputError("model file: bad integer '" + t + "'");
  return v;
}

inline std::vector<double> reals(std::istream& in, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = real(in);
  return out;
}

inline void write_reals(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << csv::format_double(values[i]);
  }
  out << '\n';
}

}  // namespace iotnames::serial
