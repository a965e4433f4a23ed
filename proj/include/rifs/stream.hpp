#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/rng.hpp"
#include "rifs/word.hpp"

namespace rifs {

/*
 * Total, seekable letter stream: at(i) is defined for every i and independent
 * of access order.  Random kinds draw letter i from the counter-mode PRNG, so
 * a stream is one immutable value determined by (kind, payload, seed).
 */
class DigitStream {
 public:
  static DigitStream periodic(EventuallyPeriodicWord w) {
    DigitStream s;
    s.word_ = std::move(w);
    return s;
  }

  static DigitStream constant(Letter a) { return periodic(EventuallyPeriodicWord({}, {a})); }

  static DigitStream random(std::uint64_t seed, std::uint32_t alphabet) {
    if (alphabet == 0) throw err_invalid_argument("random stream needs a nonempty alphabet");
    DigitStream s;
    s.seed_ = seed;
    s.alphabet_ = alphabet;
    return s;
  }

  static DigitStream weighted(std::uint64_t seed, const std::vector<double>& weights) {
    DigitStream s;
    s.seed_ = seed;
    s.alphabet_ = static_cast<std::uint32_t>(weights.size());
    try {
      s.sampler_.emplace(weights);
    } catch (const std::exception& e) {
      throw err_invalid_measure(e.what());
    }
    return s;
  }

  Letter at(std::size_t i) const {
    if (word_) return word_->at(i);
    if (sampler_) return static_cast<Letter>(sampler_->sample(seed_, i));
    return static_cast<Letter>(rng_below(seed_, i, alphabet_));
  }

  FiniteWord prefix(std::size_t n) const {
    FiniteWord w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
    return w;
  }

  // present exactly when the stream is an eventually periodic word
  const std::optional<EventuallyPeriodicWord>& periodic_form() const { return word_; }

  std::uint64_t seed() const { return seed_; }

 private:
  DigitStream() = default;

  std::optional<EventuallyPeriodicWord> word_;
  std::optional<WeightedSampler> sampler_;
  std::uint64_t seed_ = 0;
  std::uint32_t alphabet_ = 0;
};

}  // namespace rifs
