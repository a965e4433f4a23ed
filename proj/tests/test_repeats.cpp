#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rifs/repeats.hpp"
#include "rifs/rng.hpp"

using namespace rifs;

namespace {

FiniteWord random_word(std::uint64_t seed, std::size_t len, std::uint32_t alphabet) {
  FiniteWord w(len);
  for (std::size_t i = 0; i < len; ++i)
    w[i] = static_cast<Letter>(rng_below(seed, i, alphabet));
  return w;
}

std::vector<std::int32_t> brute_suffix_array(const FiniteWord& t) {
  std::vector<std::int32_t> sa(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) sa[i] = static_cast<std::int32_t>(i);
  std::sort(sa.begin(), sa.end(), [&](std::int32_t a, std::int32_t b) {
    return std::lexicographical_compare(t.begin() + a, t.end(), t.begin() + b, t.end());
  });
  return sa;
}

std::int32_t common_prefix(const FiniteWord& t, std::size_t a, std::size_t b) {
  std::int32_t r = 0;
  while (a + r < t.size() && b + r < t.size() && t[a + r] == t[b + r]) ++r;
  return r;
}

// longest prefix of the suffix at j occurring at any earlier start
PrevFactor brute_lpf(const FiniteWord& t, std::size_t j) {
  PrevFactor best;
  for (std::size_t i = 0; i < j; ++i) {
    std::int32_t len = common_prefix(t, i, j);
    if (len > best.length) best = PrevFactor{len, static_cast<std::int32_t>(i)};
  }
  return best;
}

}  // namespace

TEST_CASE("suffix array and lcp match brute force") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    std::size_t len = 1 + rng_below(seed, 1000, 40);
    std::uint32_t alphabet = 2 + static_cast<std::uint32_t>(rng_below(seed, 1001, 3));
    FiniteWord t = random_word(seed, len, alphabet);

    auto sa = suffix_array(t);
    REQUIRE(sa == brute_suffix_array(t));

    auto lcp = lcp_array(t, sa);
    REQUIRE(lcp.size() == t.size() - 1);  // entry k compares ranks k and k+1
    for (std::size_t k = 0; k + 1 < sa.size(); ++k)
      REQUIRE(lcp[k] == common_prefix(t, static_cast<std::size_t>(sa[k]),
                                      static_cast<std::size_t>(sa[k + 1])));
  }
}

TEST_CASE("suffix array handles tiny inputs") {
  REQUIRE(suffix_array(FiniteWord{}).empty());
  REQUIRE(suffix_array(FiniteWord{3}) == std::vector<std::int32_t>{0});
  FiniteWord two{1, 0};
  REQUIRE(suffix_array(two) == std::vector<std::int32_t>({1, 0}));
}

TEST_CASE("range minimum matches brute force") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::size_t len = 1 + rng_below(seed, 7, 50);
    std::vector<std::int32_t> v(len);
    for (std::size_t i = 0; i < len; ++i)
      v[i] = static_cast<std::int32_t>(rng_below(seed, 100 + i, 1000));
    RangeMin rm(v);
    for (std::size_t lo = 0; lo < len; ++lo)
      for (std::size_t hi = lo; hi < len; ++hi) {
        std::int32_t expect = v[lo];
        for (std::size_t k = lo; k <= hi; ++k) expect = std::min(expect, v[k]);
        REQUIRE(rm.min(lo, hi) == expect);
      }
  }
}

TEST_CASE("longest previous factor matches brute force") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::size_t len = 2 + rng_below(seed, 2000, 60);
    std::uint32_t alphabet = 2 + static_cast<std::uint32_t>(rng_below(seed, 2001, 2));
    FiniteWord t = random_word(seed + 1000, len, alphabet);

    auto lpf = longest_previous_factor(t);
    REQUIRE(lpf.size() == t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
      PrevFactor expect = brute_lpf(t, j);
      REQUIRE(lpf[j].length == expect.length);
      if (lpf[j].length > 0) {
        // any witness is fine as long as it is earlier and really matches
        auto prev = static_cast<std::size_t>(lpf[j].prev);
        REQUIRE(prev < j);
        REQUIRE(common_prefix(t, prev, j) >= lpf[j].length);
      }
    }
  }
}

TEST_CASE("constant word previous factors") {
  FiniteWord t(24, Letter{1});
  auto lpf = longest_previous_factor(t);
  REQUIRE(lpf[0].length == 0);
  for (std::size_t j = 1; j < t.size(); ++j) {
    REQUIRE(lpf[j].length == static_cast<std::int32_t>(t.size() - j));
    REQUIRE(lpf[j].prev >= 0);
  }
}

TEST_CASE("de bruijn words cover every window exactly once") {
  for (std::uint32_t k : {2u, 3u}) {
    for (std::uint32_t order : {1u, 2u, 3u, 4u}) {
      FiniteWord w = de_bruijn(k, order);
      std::size_t count = 1;
      for (std::uint32_t i = 0; i < order; ++i) count *= k;
      REQUIRE(w.size() == count + order - 1);

      std::set<FiniteWord> windows;
      for (std::size_t i = 0; i + order <= w.size(); ++i) {
        REQUIRE(w[i] < k);
        windows.insert(FiniteWord(w.begin() + static_cast<std::ptrdiff_t>(i),
                                  w.begin() + static_cast<std::ptrdiff_t>(i + order)));
      }
      REQUIRE(windows.size() == count);  // all distinct and all present
    }
  }
}

TEST_CASE("de bruijn validates arguments") {
  REQUIRE_THROWS_AS(de_bruijn(1, 3), Error);
  REQUIRE_THROWS_AS(de_bruijn(2, 0), Error);
}
