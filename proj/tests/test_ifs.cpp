#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rifs/errors.hpp"
#include "rifs/ifs.hpp"
#include "rifs/rng.hpp"

using namespace rifs;

namespace {

RationalIFS mixed_sign() {
  // t/3 and (3 - t)/4; hull [0, 3/4], strongly separated
  return RationalIFS({AffineMap(1, 3, 0), AffineMap(-1, 4, 3)});
}

RationalIFS both_decreasing() {
  // (1 - t)/3 and (3 - t)/3; hull [0, 1]
  return RationalIFS({AffineMap(-1, 3, 1), AffineMap(-1, 3, 3)});
}

}  // namespace

TEST_CASE("map validation") {
  CHECK_THROWS_AS(AffineMap(3, 3, 0), Error);
  CHECK_THROWS_AS(AffineMap(0, 3, 0), Error);
  CHECK_THROWS_AS(AffineMap(1, 0, 0), Error);
  CHECK_THROWS_AS(AffineMap(1, -3, 0), Error);
  CHECK_NOTHROW(AffineMap(-2, 3, 5));
}

TEST_CASE("composition multiplies coefficients without reduction") {
  auto ifs = RationalIFS::cantor();
  AffineMap u = ifs.compose_word(ifs.parse_letters("02"));
  CHECK(u.p == 1);
  CHECK(u.q == 9);
  CHECK(u.r == 2);

  AffineMap e = ifs.compose_word({});
  CHECK(e.p == 1);
  CHECK(e.q == 1);
  CHECK(e.r == 0);
}

TEST_CASE("composition is a homomorphism of words") {
  for (const auto& ifs : {RationalIFS::cantor(), mixed_sign(), both_decreasing()}) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      FiniteWord w1, w2;
      std::size_t n1 = rng_below(seed, 0, 7), n2 = rng_below(seed, 1, 7);
      for (std::size_t i = 0; i < n1; ++i)
        w1.push_back(Letter(rng_below(seed, 100 + i, ifs.alphabet_size())));
      for (std::size_t i = 0; i < n2; ++i)
        w2.push_back(Letter(rng_below(seed, 200 + i, ifs.alphabet_size())));
      AffineMap lhs = ifs.compose_word(concat(w1, w2));
      AffineMap rhs = ifs.compose_word(w1).composed_with(ifs.compose_word(w2));
      CHECK(lhs == rhs);

      Rational x = rat(rng_below(seed, 300, 100), 101);
      Rational walked = x;
      for (auto it = w1.rbegin(); it != w1.rend(); ++it) walked = ifs.map(*it).apply(walked);
      CHECK(ifs.compose_word(w1).apply(x) == walked);
    }
  }
}

TEST_CASE("hull endpoints are exact") {
  CHECK(RationalIFS::cantor().hull() == Interval(rat(0, 1), rat(1, 1)));

  RationalIFS right({AffineMap(1, 3, 1), AffineMap(1, 3, 2)});
  CHECK(right.hull() == Interval(rat(1, 2), rat(1, 1)));

  RationalIFS times3({AffineMap(1, 3, 0), AffineMap(1, 3, 1)});
  CHECK(times3.hull() == Interval(rat(0, 1), rat(1, 2)));

  CHECK(mixed_sign().hull() == Interval(rat(0, 1), rat(3, 4)));
  CHECK(both_decreasing().hull() == Interval(rat(0, 1), rat(1, 1)));

  RationalIFS lone({AffineMap(-1, 3, 3)});
  CHECK(lone.hull() == Interval(rat(3, 4), rat(3, 4)));
}

TEST_CASE("hull is invariant and attained") {
  for (const auto& ifs : {RationalIFS::cantor(), mixed_sign(), both_decreasing()}) {
    Interval h = ifs.hull();
    Rational lo = h.hi, hi = h.lo;
    for (Letter a = 0; a < ifs.alphabet_size(); ++a) {
      Interval im = ifs.image_of_hull(a);
      REQUIRE(h.lo <= im.lo);
      REQUIRE(im.hi <= h.hi);
      lo = std::min(lo, im.lo);
      hi = std::max(hi, im.hi);
    }
    CHECK(lo == h.lo);
    CHECK(hi == h.hi);
  }
}

TEST_CASE("separation of first-level images") {
  CHECK(RationalIFS::cantor().strong_separation());
  CHECK(RationalIFS::cantor().open_set_condition());

  RationalIFS times2({AffineMap(1, 2, 0), AffineMap(1, 2, 1)});
  CHECK_FALSE(times2.strong_separation());
  CHECK(times2.open_set_condition());

  RationalIFS times3({AffineMap(1, 3, 0), AffineMap(1, 3, 1)});
  CHECK(times3.strong_separation());

  CHECK(mixed_sign().strong_separation());
  CHECK(both_decreasing().strong_separation());

  // t/2 and (2t+1)/3: hull [0,1], images [0,1/2] and [1/3,1] overlap
  RationalIFS overlap({AffineMap(1, 2, 0), AffineMap(2, 3, 1)});
  CHECK_FALSE(overlap.open_set_condition());
}

TEST_CASE("similarity dimension by bisection") {
  auto d = RationalIFS::cantor().dimension();
  double expected = std::log(2.0) / std::log(3.0);
  CHECK(std::abs(d.value - expected) <= 1e-12 + d.error);
  CHECK(d.error <= 1e-12);
  CHECK(d.iterations <= 60);

  RationalIFS fat({AffineMap(2, 3, 0), AffineMap(2, 3, 1)});
  auto d2 = fat.dimension();
  CHECK(std::abs(d2.value - std::log(2.0) / std::log(1.5)) <= 1e-10);

  CHECK_THROWS_AS(RationalIFS::cantor().dimension(0.0), Error);
  CHECK_THROWS_AS(RationalIFS({AffineMap(1, 3, 0)}).dimension(), Error);
}

TEST_CASE("growth exponent") {
  CHECK(RationalIFS::cantor().gamma() == 0.0);
  RationalIFS g({AffineMap(2, 5, 1)});
  CHECK(std::abs(g.gamma() - std::log(2.0) / std::log(5.0)) <= 1e-15);
  CHECK(std::abs(mixed_sign().gamma() - 0.0) <= 1e-15);
}

TEST_CASE("eventually periodic evaluation keeps the structural denominator") {
  auto ifs = RationalIFS::cantor();

  Rational x = ifs.eval(EventuallyPeriodicWord({}, {0, 1}));  // (02)^inf
  CHECK(x.num() == 2);
  CHECK(x.den() == 8);
  CHECK(x.reduced() == rat(1, 4));

  Rational y = ifs.eval(EventuallyPeriodicWord({}, {1}));  // (2)^inf
  CHECK(y.num() == 2);
  CHECK(y.den() == 2);
  CHECK(y.reduced() == rat(1, 1));

  Rational z = ifs.eval(EventuallyPeriodicWord({0}, {1}));  // 0(2)^inf
  CHECK(z.num() == 2);
  CHECK(z.den() == 6);
  CHECK(z.reduced() == rat(1, 3));

  // negative slope: tail denominator is q + |p|
  Rational w = both_decreasing().eval(EventuallyPeriodicWord({}, {1}));
  CHECK(w.den() == 4);
  CHECK(w.reduced() == rat(3, 4));
}

TEST_CASE("evaluation agrees with cylinder shrinking") {
  for (const auto& ifs : {RationalIFS::cantor(), mixed_sign(), both_decreasing()}) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      FiniteWord pre, per;
      std::size_t npre = rng_below(seed, 0, 4), nper = 1 + rng_below(seed, 1, 4);
      for (std::size_t i = 0; i < npre; ++i)
        pre.push_back(Letter(rng_below(seed, 100 + i, ifs.alphabet_size())));
      for (std::size_t i = 0; i < nper; ++i)
        per.push_back(Letter(rng_below(seed, 200 + i, ifs.alphabet_size())));
      EventuallyPeriodicWord w(pre, per);
      Rational v = ifs.eval(w);
      Interval cyl = ifs.point_enclosure([&](std::size_t i) { return w.at(i); }, 24);
      REQUIRE(cyl.contains(v));
    }
  }
}

TEST_CASE("cylinders and enclosures nest") {
  auto ifs = RationalIFS::cantor();
  CHECK(ifs.cylinder(ifs.parse_letters("02")) == Interval(rat(2, 9), rat(3, 9)));
  CHECK(ifs.cylinder({}) == ifs.hull());

  for (const auto& sys : {RationalIFS::cantor(), mixed_sign(), both_decreasing()}) {
    auto stream = [&](std::size_t i) { return Letter(rng_below(99, i, sys.alphabet_size())); };
    Interval prev = sys.point_enclosure(stream, 0);
    CHECK(prev == sys.hull());
    for (std::size_t d = 1; d <= 20; ++d) {
      Interval cur = sys.point_enclosure(stream, d);
      REQUIRE(prev.lo <= cur.lo);
      REQUIRE(cur.hi <= prev.hi);
      prev = cur;
    }
  }
}

TEST_CASE("inverse branch inverts exactly") {
  AffineMap u(-3, 7, 5);
  Rational x = rat(2, 11);
  CHECK(u.inverse_apply(u.apply(x)) == x);
  CHECK(u.apply(u.inverse_apply(x)) == x);
}

TEST_CASE("display digits and letter parsing") {
  auto ifs = RationalIFS::cantor();
  CHECK(ifs.display(0) == "0");
  CHECK(ifs.display(1) == "2");
  FiniteWord w = ifs.parse_letters("0 220");
  CHECK(w == FiniteWord{0, 1, 1, 0});
  CHECK(ifs.render(w) == "0220");
  CHECK(ifs.render(EventuallyPeriodicWord({0}, {1})) == "0(2)^inf");
  CHECK_THROWS_AS(ifs.parse_letters("013"), Error);
  CHECK(!ifs.letter_of_display("1").has_value());
  CHECK(ifs.letter_of_display("2") == Letter(1));
}

TEST_CASE("text format parsing") {
  auto ifs = RationalIFS::parse_string("# comment\n1 3 0\n1 3 2\nletters: 0 2\n");
  CHECK(ifs.alphabet_size() == 2);
  CHECK(ifs.map(1).r == 2);
  CHECK(ifs.display(1) == "2");
  CHECK(ifs.hull() == Interval(rat(0, 1), rat(1, 1)));

  CHECK_THROWS_AS(RationalIFS::parse_string(""), Error);
  CHECK_THROWS_AS(RationalIFS::parse_string("1 3\n"), Error);
  CHECK_THROWS_AS(RationalIFS::parse_string("1 3 0 9\n"), Error);
  CHECK_THROWS_AS(RationalIFS::parse_string("x 3 0\n"), Error);
  CHECK_THROWS_AS(RationalIFS::parse_string("3 3 0\n"), Error);
  CHECK_THROWS_AS(RationalIFS::parse_string("1 3 0\nletters: a b\n"), Error);

  try {
    RationalIFS::parse_string("5 3 0\n");
    FAIL("expected NotContracting");
  } catch (const Error& e) {
    CHECK(e.code() == "NotContracting");
  }
}

TEST_CASE("q_max and log bounds") {
  auto m = mixed_sign();
  CHECK(m.q_max() == 4);
  CHECK(std::abs(m.min_log_q() - std::log(3.0)) <= 1e-15);
  CHECK(std::abs(m.max_log_q() - std::log(4.0)) <= 1e-15);
}
