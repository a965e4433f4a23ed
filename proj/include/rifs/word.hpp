#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rifs {

// letters are indices into an IFS alphabet; display digits are a separate concern
using Letter = std::uint8_t;
using FiniteWord = std::vector<Letter>;

inline FiniteWord concat(const FiniteWord& a, const FiniteWord& b) {
  FiniteWord r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// length of the shortest block whose repetition gives w (w itself if aperiodic)
inline std::size_t primitive_period(const FiniteWord& w) {
  std::size_t n = w.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool ok = true;
    for (std::size_t i = len; i < n && ok; ++i) ok = (w[i] == w[i - len]);
    if (ok) return len;
  }
  return n;
}

/*
 * Eventually periodic word: pre once, then per forever.  The canonical form
 * has a primitive period block and the shortest possible preperiod; it is the
 * unique representative of the underlying infinite letter sequence with
 * minimal (|pre|, |per|).  Canonicalization rotates the period block while
 * absorbing it into a shrinking preperiod, which never changes the sequence.
 */
struct EventuallyPeriodicWord {
  FiniteWord pre, per;

  EventuallyPeriodicWord() = default;
  EventuallyPeriodicWord(FiniteWord preperiod, FiniteWord period)
      : pre(std::move(preperiod)), per(std::move(period)) {
    if (per.empty()) throw std::invalid_argument("EventuallyPeriodicWord: empty period");
  }

  Letter at(std::size_t i) const {
    if (i < pre.size()) return pre[i];
    return per[(i - pre.size()) % per.size()];
  }

  EventuallyPeriodicWord canonical() const {
    FiniteWord p = pre;
    std::size_t root = primitive_period(per);
    FiniteWord q(per.begin(), per.begin() + static_cast<std::ptrdiff_t>(root));
    while (!p.empty() && p.back() == q.back()) {
      p.pop_back();
      std::rotate(q.rbegin(), q.rbegin() + 1, q.rend());
    }
    return EventuallyPeriodicWord(std::move(p), std::move(q));
  }

  bool is_canonical() const {
    if (primitive_period(per) != per.size()) return false;
    return pre.empty() || pre.back() != per.back();
  }

  friend bool operator==(const EventuallyPeriodicWord& a, const EventuallyPeriodicWord& b) {
    return a.pre == b.pre && a.per == b.per;
  }
};

}  // namespace rifs
