#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace iotnames {

/// One step of the splitmix64 sequence; used to expand a master seed into
/// independent child seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Child seed number `index` derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seedable generator with platform-stable derived distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so integer and real draws
/// are derived here directly from the raw 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform_real();

  /// Uniform real in [lo, hi).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  /// `count` distinct indices drawn uniformly from [0, population), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace iotnames
