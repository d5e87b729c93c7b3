#include "iotnames/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "iotnames/error.hpp"

namespace iotnames {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.empty()) throw InputError("bandwidth of an empty sample");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;  // IQR collapses on heavily tied data
  double bw = 0.9 * spread * std::pow(n, -0.2);

  const bool integral = std::all_of(values.begin(), values.end(), [](double v) { return v == std::floor(v); });
  if (integral || !(bw > 0.0)) bw = std::max(bw, kIntegerBandwidthFloor);
  return bw;
}

double trapezoid_mass(std::span<const DensityPoint> curve) {
  double mass = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    mass += 0.5 * (curve[i].pdf + curve[i - 1].pdf) * (curve[i].x - curve[i - 1].x);
  }
  return mass;
}

DistributionSummary summarize(std::span<const double> values) {
  if (values.empty()) throw InputError("cannot summarize an empty sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("cannot summarize non-finite values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  DistributionSummary s;
  s.n = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  s.bandwidth = silverman_bandwidth(values);

  const double lo = s.min - s.bandwidth;
  const double hi = s.max + s.bandwidth;
  const double step = (hi - lo) / static_cast<double>(kDensityPoints - 1);
  const double norm = 1.0 / (static_cast<double>(s.n) * s.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  s.density.resize(kDensityPoints);
  for (std::size_t i = 0; i < kDensityPoints; ++i) {
    // Measure from both ends so the grid is exactly symmetric.
    const double x = i < kDensityPoints / 2 ? lo + static_cast<double>(i) * step
                                            : hi - static_cast<double>(kDensityPoints - 1 - i) * step;
    double sum = 0.0;
    for (double v : sorted) {
      const double z = (x - v) / s.bandwidth;
      sum += std::exp(-0.5 * z * z);
    }
    s.density[i] = {x, sum * norm};
  }
  // The grid stops one bandwidth past the data, so rescale to unit mass.
  const double mass = trapezoid_mass(s.density);
  for (auto& p : s.density) p.pdf /= mass;
  return s;
}

namespace {

template <typename F>
DistributionSummary summarize_names(const NameList& list, F&& measure) {
  if (list.empty()) throw InputError("list '" + list.id() + "' is empty");
  std::vector<double> values;
  values.reserve(list.size());
  for (const auto& name : list) values.push_back(static_cast<double>(measure(name)));
  return summarize(values);
}

}  // namespace

DistributionSummary name_length_stats(const NameList& list) {
  return summarize_names(list, [](const DomainName& n) { return n.char_length(); });
}

DistributionSummary label_count_stats(const NameList& list) {
  return summarize_names(list, [](const DomainName& n) { return n.label_count(); });
}

LabelFrequencyTable top_labels(const NameList& list, std::size_t top_n) {
  if (list.empty()) throw InputError("list '" + list.id() + "' is empty");
  if (top_n == 0) throw InputError("top_n must be at least 1");
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& name : list) {
    for (const auto& label : name.labels()) {
      ++counts[label];
      ++total;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  LabelFrequencyTable table;
  table.total_occurrences = total;
  std::size_t listed = 0;
  for (std::size_t i = 0; i < std::min(top_n, ranked.size()); ++i) {
    table.entries.emplace_back(ranked[i].first, static_cast<double>(ranked[i].second) / static_cast<double>(total));
    listed += ranked[i].second;
  }
  table.others_mass = static_cast<double>(total - listed) / static_cast<double>(total);
  return table;
}

}  // namespace iotnames
