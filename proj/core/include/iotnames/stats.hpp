#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iotnames/corpus.hpp"

namespace iotnames {

struct DensityPoint {
  double x = 0.0;
  double pdf = 0.0;
};

/// Box-plot quantiles plus a kernel density estimate (violin-plot data).
struct DistributionSummary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double bandwidth = 0.0;
  std::vector<DensityPoint> density;
};

inline constexpr std::size_t kDensityPoints = 128;
inline constexpr double kIntegerBandwidthFloor = 0.25;

/// Linear interpolation between closest ranks ("type 7") on sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Silverman's rule, 0.9 * min(sd, IQR / 1.34) * n^(-1/5), floored at 0.25
/// when every value is an integer or the rule yields zero.
double silverman_bandwidth(std::span<const double> values);

/// Gaussian KDE on 128 evenly spaced points over [min - bw, max + bw],
/// rescaled so its trapezoid integral over that grid is 1.
DistributionSummary summarize(std::span<const double> values);

DistributionSummary name_length_stats(const NameList& list);
DistributionSummary label_count_stats(const NameList& list);

struct LabelFrequencyTable {
  std::vector<std::pair<std::string, double>> entries;
  double others_mass = 0.0;
  std::size_t total_occurrences = 0;
};

/// Share of each label among all label occurrences; the `top_n` most common
/// are listed (ties by label text) and the rest pooled in others_mass.
LabelFrequencyTable top_labels(const NameList& list, std::size_t top_n);

/// Trapezoid integral of a density curve.
double trapezoid_mass(std::span<const DensityPoint> curve);

}  // namespace iotnames
