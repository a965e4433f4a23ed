#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rifs {

/*
 * All randomness in this project flows through SplitMix64 (the public-domain
 * generator of Steele, Lea and Flood, in Vigna's splitmix64 formulation) used
 * in counter mode: draw i of seed s is mix(s + (i+1)*GAMMA).  Counter mode
 * makes every stream O(1)-seekable and makes output independent of thread
 * scheduling.  Scheme tag: "splitmix64-v1" (recorded in run manifests).
 */
constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t rng_draw(std::uint64_t seed, std::uint64_t index) {
  return splitmix64_mix(seed + (index + 1) * kSplitMixGamma);
}

// uniform in [0, 1), 53-bit mantissa
inline double rng_unit(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(rng_draw(seed, index) >> 11) * 0x1.0p-53;
}

// derived seed for independent substreams (per trial, per shard, ...)
inline std::uint64_t rng_substream(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64_mix(seed + splitmix64_mix(stream + 1));
}

inline std::uint32_t rng_below(std::uint64_t seed, std::uint64_t index, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("rng_below: n must be positive");
  double u = rng_unit(seed, index);
  auto v = static_cast<std::uint32_t>(u * n);
  return v >= n ? n - 1 : v;
}

/*
 * Cumulative-weight sampler over a finite alphabet.  Weights must sum to 1
 * within 1e-9 (they come from lambda^delta with a float delta); they are
 * renormalized exactly once at construction.
 */
class WeightedSampler {
 public:
  explicit WeightedSampler(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("WeightedSampler: empty weights");
    double total = 0;
    for (double w : weights) {
      if (w < 0) throw std::domain_error("WeightedSampler: negative weight");
      total += w;
    }
    if (total < 1.0 - 1e-9 || total > 1.0 + 1e-9)
      throw std::domain_error("WeightedSampler: weights must sum to 1 within 1e-9");
    double acc = 0;
    for (double w : weights) {
      acc += w / total;
      cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
  }

  std::uint32_t sample(std::uint64_t seed, std::uint64_t index) const {
    double u = rng_unit(seed, index);
    for (std::uint32_t i = 0; i + 1 < cumulative_.size(); ++i)
      if (u < cumulative_[i]) return i;
    return static_cast<std::uint32_t>(cumulative_.size() - 1);
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace rifs
