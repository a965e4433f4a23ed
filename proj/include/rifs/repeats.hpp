#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/word.hpp"

namespace rifs {

// suffix array by rank doubling with counting sorts, O(n log n)
inline std::vector<std::int32_t> suffix_array(const FiniteWord& text) {
  const std::int32_t n = static_cast<std::int32_t>(text.size());
  if (n == 0) return {};
  std::vector<std::int32_t> sa(n), rnk(n), tmp(n), cnt;
  for (std::int32_t i = 0; i < n; ++i) {
    sa[i] = i;
    rnk[i] = text[i];
  }

  // stable counting sort of sa by key(suffix start), keys in [0, kmax]
  auto sort_by = [&](auto key, std::int32_t kmax) {
    cnt.assign(static_cast<std::size_t>(kmax) + 1, 0);
    for (std::int32_t i = 0; i < n; ++i) ++cnt[key(sa[i])];
    std::int32_t acc = 0;
    for (auto& c : cnt) {
      std::int32_t was = c;
      c = acc;
      acc += was;
    }
    std::vector<std::int32_t> out(n);
    for (std::int32_t i = 0; i < n; ++i) out[cnt[key(sa[i])]++] = sa[i];
    sa.swap(out);
  };

  sort_by([&](std::int32_t p) { return rnk[p]; }, 255);
  {
    std::int32_t r = 0;
    tmp[sa[0]] = 0;
    for (std::int32_t i = 1; i < n; ++i) {
      if (text[sa[i]] != text[sa[i - 1]]) ++r;
      tmp[sa[i]] = r;
    }
    rnk.swap(tmp);
  }

  for (std::int32_t len = 1; len < n; len *= 2) {
    auto second = [&](std::int32_t p) { return p + len < n ? rnk[p + len] + 1 : 0; };
    sort_by(second, n);
    sort_by([&](std::int32_t p) { return rnk[p]; }, n - 1);
    std::int32_t r = 0;
    tmp[sa[0]] = 0;
    for (std::int32_t i = 1; i < n; ++i) {
      if (rnk[sa[i]] != rnk[sa[i - 1]] || second(sa[i]) != second(sa[i - 1])) ++r;
      tmp[sa[i]] = r;
    }
    rnk.swap(tmp);
    if (r == n - 1) break;
  }
  return sa;
}

// Kasai: lcp[k] is the longest common prefix of the suffixes ranked k and k+1
inline std::vector<std::int32_t> lcp_array(const FiniteWord& text,
                                           const std::vector<std::int32_t>& sa) {
  const std::int32_t n = static_cast<std::int32_t>(text.size());
  std::vector<std::int32_t> rnk(n), lcp(n > 0 ? n - 1 : 0, 0);
  for (std::int32_t i = 0; i < n; ++i) rnk[sa[i]] = i;
  std::int32_t h = 0;
  for (std::int32_t i = 0; i < n; ++i) {
    if (rnk[i] + 1 < n) {
      std::int32_t j = sa[rnk[i] + 1];
      while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
      lcp[rnk[i]] = h;
      if (h > 0) --h;
    } else {
      h = 0;
    }
  }
  return lcp;
}

// idempotent range minimum over a fixed array, O(1) query after O(n log n) build
class RangeMin {
 public:
  explicit RangeMin(std::vector<std::int32_t> values) {
    table_.push_back(std::move(values));
    std::size_t n = table_[0].size();
    for (std::size_t len = 2; len <= n; len *= 2) {
      const auto& prev = table_.back();
      std::vector<std::int32_t> row(n - len + 1);
      for (std::size_t i = 0; i + len <= n; ++i)
        row[i] = std::min(prev[i], prev[i + len / 2]);
      table_.push_back(std::move(row));
    }
  }

  // minimum of values[lo..hi], inclusive; requires lo <= hi < n
  std::int32_t min(std::size_t lo, std::size_t hi) const {
    std::size_t span = hi - lo + 1, level = 0;
    while ((std::size_t(2) << level) <= span) ++level;
    return std::min(table_[level][lo], table_[level][hi + 1 - (std::size_t(1) << level)]);
  }

 private:
  std::vector<std::vector<std::int32_t>> table_;
};

struct PrevFactor {
  std::int32_t length = 0;  // longest block starting at this position that also starts earlier
  std::int32_t prev = -1;   // one earlier start achieving it (overlap with the position allowed)
};

/*
 * Longest previous factor of every position, overlaps permitted: the earlier
 * occurrence may run into the current one (a^n gives length j at position j).
 * For each position j the best earlier start is, in suffix-array order, a
 * neighbor of j among the already-seen positions, so an ordered set of seen
 * ranks plus an RMQ over the lcp array answers each position in O(log n).
 */
inline std::vector<PrevFactor> longest_previous_factor(const FiniteWord& text) {
  const std::int32_t n = static_cast<std::int32_t>(text.size());
  std::vector<PrevFactor> out(n);
  if (n < 2) return out;
  auto sa = suffix_array(text);
  auto lcp = lcp_array(text, sa);
  RangeMin rmq(lcp);
  std::vector<std::int32_t> rnk(n);
  for (std::int32_t r = 0; r < n; ++r) rnk[sa[r]] = r;

  std::set<std::int32_t> seen;
  for (std::int32_t j = 0; j < n; ++j) {
    std::int32_t rj = rnk[j];
    PrevFactor best;
    auto above = seen.upper_bound(rj);
    if (above != seen.end()) {
      std::int32_t len = rmq.min(static_cast<std::size_t>(rj), static_cast<std::size_t>(*above) - 1);
      if (len > best.length) best = PrevFactor{len, sa[*above]};
    }
    if (above != seen.begin()) {
      std::int32_t rp = *std::prev(above);
      std::int32_t len = rmq.min(static_cast<std::size_t>(rp), static_cast<std::size_t>(rj) - 1);
      if (len > best.length) best = PrevFactor{len, sa[rp]};
    }
    out[j] = best;
    seen.insert(rj);
  }
  return out;
}

/*
 * Linearized de Bruijn word over {0..k-1} of the given order, by the
 * Fredricksen-Kessler-Maiorana concatenation of Lyndon words, extended with
 * order-1 wraparound letters so that every window of `order` letters in the
 * returned word is distinct.  Length k^order + order - 1.
 */
inline FiniteWord de_bruijn(std::uint32_t k, std::uint32_t order) {
  if (k < 2 || k > 255) throw err_invalid_argument("de_bruijn: alphabet size must be in [2,255]");
  if (order < 1) throw err_invalid_argument("de_bruijn: order must be >= 1");
  FiniteWord seq;
  std::vector<Letter> a(order + 1, 0);
  // iterative FKM over t (current length) with explicit recursion stack
  struct Frame {
    std::uint32_t t, p;
    Letter next;
    bool expanded;
  };
  std::vector<Frame> stack{{1, 1, 0, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.t > order) {
      if (order % f.p == 0)
        for (std::uint32_t i = 1; i <= f.p; ++i) seq.push_back(a[i]);
      continue;
    }
    if (!f.expanded) {
      // descend with a[t] = a[t-p] first; queue the larger letters after
      stack.push_back(Frame{f.t, f.p, static_cast<Letter>(a[f.t - f.p] + 1), true});
      a[f.t] = a[f.t - f.p];
      stack.push_back(Frame{f.t + 1, f.p, 0, false});
    } else if (f.next < k) {
      stack.push_back(Frame{f.t, f.p, static_cast<Letter>(f.next + 1), true});
      a[f.t] = f.next;
      stack.push_back(Frame{f.t + 1, f.t, 0, false});
    }
  }
  FiniteWord out = seq;
  for (std::uint32_t i = 0; i + 1 < order; ++i) out.push_back(seq[i]);
  return out;
}

}  // namespace rifs
