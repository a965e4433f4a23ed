#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/factor.hpp"
#include "rifs/ifs.hpp"
#include "rifs/stream.hpp"
#include "rifs/word.hpp"

namespace rifs {

/*
 * Multiplication-by-d invariant set: reals in [0,1] admitting a base-d
 * expansion with every digit in E.  Equivalently the attractor of the maps
 * t -> (t + e)/d, e in E, which is how the generic IFS machinery sees it.
 */
struct TimesDSet {
  unsigned d;
  std::vector<unsigned> digits;  // E, strictly increasing

  TimesDSet(unsigned base, std::vector<unsigned> allowed)
      : d(base), digits(std::move(allowed)) {
    if (d < 2) throw err_invalid_argument("base d must be >= 2");
    if (digits.empty()) throw err_invalid_argument("digit set must be nonempty");
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    if (digits.back() >= d) throw err_invalid_argument("digits must lie in [0, d)");
  }

  static TimesDSet cantor() { return TimesDSet(3, {0, 2}); }

  // "d=3,E=0,2"
  static TimesDSet parse(const std::string& spec) {
    unsigned base = 0;
    std::vector<unsigned> allowed;
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) {
      auto eq = part.find('=');
      if (eq == std::string::npos) {
        try {
          allowed.push_back(static_cast<unsigned>(std::stoul(part)));
        } catch (...) {
          throw err_bad_file("cannot parse set spec near '" + part + "'");
        }
        continue;
      }
      std::string key = part.substr(0, eq), val = part.substr(eq + 1);
      try {
        if (key == "d")
          base = static_cast<unsigned>(std::stoul(val));
        else if (key == "E")
          allowed.push_back(static_cast<unsigned>(std::stoul(val)));
        else
          throw err_bad_file("unknown key '" + key + "' in set spec");
      } catch (const Error&) {
        throw;
      } catch (...) {
        throw err_bad_file("cannot parse set spec near '" + part + "'");
      }
    }
    return TimesDSet(base, std::move(allowed));
  }

  std::string spec_string() const {
    std::string s = "d=" + std::to_string(d) + ",E=";
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(digits[i]);
    }
    return s;
  }

  bool allows(unsigned digit) const {
    return std::binary_search(digits.begin(), digits.end(), digit);
  }

  unsigned digit_of(Letter a) const {
    if (a >= digits.size()) throw err_invalid_letter("letter out of range");
    return digits[a];
  }

  RationalIFS ifs() const {
    std::vector<AffineMap> maps;
    std::vector<std::string> display;
    for (unsigned e : digits) {
      maps.emplace_back(1, static_cast<long>(d), static_cast<long>(e));
      display.push_back(std::to_string(e));
    }
    return RationalIFS(std::move(maps), std::move(display));
  }

  double dimension() const {
    return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(d));
  }
};

/*
 * Eventually periodic base-d expansion: r preperiod digits, then the period
 * block forever.  `terminating` marks the m = 1 all-zero-period convention
 * applied to values of the form p/d^r.  Reconstruction:
 *   value = (A (d^m - 1) + B) / (d^r (d^m - 1))
 * with A, B the digit blocks read as base-d integers.
 */
struct BaseDExpansion {
  Int r;
  std::vector<unsigned> pre;  // r digits, most significant first
  std::vector<unsigned> per;  // m >= 1 digits
  bool terminating = false;

  std::size_t m() const { return per.size(); }
};

struct ExpansionPair {
  BaseDExpansion primary;
  std::optional<BaseDExpansion> dual;  // present exactly for p/d^k with 0 < p/d^k < 1
};

inline Rational expansion_value(unsigned d, const BaseDExpansion& e) {
  Int A = 0, B = 0;
  for (unsigned dig : e.pre) A = A * d + dig;
  for (unsigned dig : e.per) B = B * d + dig;
  Int dm = int_pow(Int(d), static_cast<unsigned long>(e.per.size())) - 1;
  Int dr = int_pow(Int(d), e.r.get_ui());
  return Rational(A * dm + B, dr * dm);
}

// d-adic valuation split of q: returns (r, q_free) with q | d^r * q_free,
// q_free the largest divisor of q coprime to d, r minimal
inline std::pair<Int, Int> d_part_split(unsigned d, const Int& q) {
  Int free = q;
  Int g = int_gcd(free, Int(d));
  while (g > 1) {
    free /= g;
    g = int_gcd(free, Int(d));
  }
  Int rough = q / free;  // every prime factor divides d
  Int r = 0, cur = rough;
  while (cur > 1) {
    cur /= int_gcd(cur, Int(d));
    ++r;
  }
  return {r, free};
}

// (preperiod, period) of the base-d expansion of x in [0,1]:
// preperiod from the d-part of the denominator, period from the
// multiplicative order of d modulo the d-free part (1 -> period 1)
inline std::pair<Int, Int> period_of(unsigned d, const Rational& x) {
  if (d < 2) throw err_invalid_argument("base d must be >= 2");
  if (x < Rational(0) || x > Rational(1)) throw err_out_of_range("x must lie in [0,1]");
  Rational xr = x.reduced();
  auto [r, free] = d_part_split(d, xr.den());
  Int m = free == 1 ? Int(1) : multiplicative_order(Int(d), free);
  return {r, m};
}

inline ExpansionPair expand_rational(unsigned d, const Rational& x) {
  if (d < 2) throw err_invalid_argument("base d must be >= 2");
  if (x < Rational(0) || x > Rational(1)) throw err_out_of_range("x must lie in [0,1]");
  Rational xr = x.reduced();

  ExpansionPair out;
  if (xr == Rational(1)) {
    // 0.(d-1)(d-1)... is the only in-range expansion of 1
    out.primary = BaseDExpansion{0, {}, {d - 1}, false};
    return out;
  }

  const Int& a = xr.num();
  const Int& b = xr.den();
  auto [r, free] = d_part_split(d, b);
  unsigned long rl = r.get_ui();

  auto digits_of = [&](Int v, unsigned long width) {
    std::vector<unsigned> dig(width, 0);
    for (unsigned long i = width; i-- > 0;) {
      dig[i] = static_cast<unsigned>(mpz_fdiv_ui(v.get_mpz_t(), d));
      v /= d;
    }
    return dig;
  };

  if (free == 1) {
    // terminating: b | d^r but b need not be a power of d (q = 512, d = 10),
    // so the r-digit block is a scaled numerator, not a itself
    Int block = a * (int_pow(Int(d), rl) / b);
    out.primary = BaseDExpansion{r, digits_of(block, rl), {0}, true};
    if (block > 0) out.dual = BaseDExpansion{r, digits_of(block - 1, rl), {d - 1}, false};
    return out;
  }

  Int m = multiplicative_order(Int(d), free);
  unsigned long ml = m.get_ui();
  std::vector<unsigned> pre(rl), per(ml);
  Int num = a;
  for (unsigned long i = 0; i < rl + ml; ++i) {
    num *= d;
    Int digit = num / b;
    num -= digit * b;
    unsigned dv = static_cast<unsigned>(digit.get_ui());
    if (i < rl)
      pre[i] = dv;
    else
      per[i - rl] = dv;
  }
  out.primary = BaseDExpansion{r, std::move(pre), std::move(per), false};
  return out;
}

struct MemberResult {
  bool member = false;
  std::optional<BaseDExpansion> certificate;      // an expansion with all digits in E
  std::optional<std::pair<Int, unsigned>> refusal;  // 1-based digit position, digit value
};

/*
 * Membership of a rational in the digit set.  Terminating values have two
 * expansions and either one qualifies; everything else has a unique expansion
 * checked digit by digit with an early exit inside the preperiod.
 */
inline MemberResult member(const TimesDSet& J, const Rational& x) {
  if (x < Rational(0) || x > Rational(1)) throw err_out_of_range("x must lie in [0,1]");
  MemberResult res;
  ExpansionPair ex = expand_rational(J.d, x);

  auto first_bad = [&](const BaseDExpansion& e) -> std::optional<std::pair<Int, unsigned>> {
    Int pos = 1;
    for (unsigned dig : e.pre) {
      if (!J.allows(dig)) return std::make_pair(pos, dig);
      ++pos;
    }
    for (unsigned dig : e.per) {
      if (!J.allows(dig)) return std::make_pair(pos, dig);
      ++pos;
    }
    return std::nullopt;
  };

  auto bad = first_bad(ex.primary);
  if (!bad) {
    res.member = true;
    res.certificate = ex.primary;
    return res;
  }
  if (ex.dual) {
    auto bad2 = first_bad(*ex.dual);
    if (!bad2) {
      res.member = true;
      res.certificate = *ex.dual;
      return res;
    }
  }
  res.refusal = bad;
  return res;
}

struct TranslateApproximant {
  Rational approx;       // p0/q0 + r_n, exact
  Rational r_n;          // the correction, a multiple of 1/d^n
  Int denom_bound;       // q0 * d^n, exact bound on denom(approx)
  Rational error_bound;  // d^{-n}, exact bound on |y - approx|
};

namespace detail {

// first n digit values of an E-indexed stream, packed as a base-d integer block
inline Int stream_block(const TimesDSet& J, const DigitStream& s, std::size_t n) {
  Int v = 0;
  for (std::size_t i = 0; i < n; ++i) v = v * J.d + J.digit_of(s.at(i));
  return v;
}

enum class BlockStatus { ok, out_of_range, leaves_digit_set, undetermined };

/*
 * First n base-d digits of x + shift as an integer block, where x is known
 * only through its digit stream.  With an eventually periodic stream the sum
 * is an exact rational and the digits come from its expansion (preferring a
 * representation whose first n digits stay in E).  Otherwise the enclosure of
 * x is deepened until both endpoints of the shifted interval agree on the
 * first n digits; `undetermined` reports a cap hit.
 */
inline BlockStatus shifted_block_status(const TimesDSet& J, const DigitStream& x,
                                        const Rational& shift, std::size_t n,
                                        const RationalIFS& ifs, Int& out) {
  Int dn = int_pow(Int(J.d), n);
  if (auto w = x.periodic_form()) {
    Rational s = ifs.eval(*w) + shift;
    if (s < Rational(0) || s > Rational(1)) return BlockStatus::out_of_range;
    if (s == Rational(1)) {
      out = dn - 1;  // 0.(d-1)^inf
      return J.allows(J.d - 1) ? BlockStatus::ok : BlockStatus::leaves_digit_set;
    }
    ExpansionPair ex = expand_rational(J.d, s);
    auto digit_at = [&](const BaseDExpansion& e, std::size_t i) {
      std::size_t rl = e.pre.size();
      return i < rl ? e.pre[i] : e.per[(i - rl) % e.per.size()];
    };
    auto ok_to_depth = [&](const BaseDExpansion& e) {
      for (std::size_t i = 0; i < n; ++i)
        if (!J.allows(digit_at(e, i))) return false;
      return true;
    };
    const BaseDExpansion* chosen = nullptr;
    if (ok_to_depth(ex.primary))
      chosen = &ex.primary;
    else if (ex.dual && ok_to_depth(*ex.dual))
      chosen = &*ex.dual;
    if (!chosen) return BlockStatus::leaves_digit_set;
    Int v = 0;
    for (std::size_t i = 0; i < n; ++i) v = v * J.d + digit_at(*chosen, i);
    out = v;
    return BlockStatus::ok;
  }
  std::size_t cap = std::max<std::size_t>(4 * n, 256);
  for (std::size_t depth = std::max<std::size_t>(n, 8); depth <= cap; depth *= 2) {
    Interval enc = ifs.point_enclosure([&](std::size_t i) { return x.at(i); }, depth);
    Interval s(enc.lo + shift, enc.hi + shift);
    Int lo_block = (s.lo * Rational(dn)).floor();
    Int hi_block = (s.hi * Rational(dn)).floor();
    if (hi_block == lo_block + 1 && Rational(hi_block, dn) == s.hi)
      hi_block = lo_block;  // hi endpoint sits exactly on the digit edge
    if (lo_block == hi_block) {
      if (lo_block < 0 || lo_block >= dn) return BlockStatus::out_of_range;
      Int probe = lo_block;
      for (std::size_t i = 0; i < n; ++i) {
        if (!J.allows(static_cast<unsigned>(mpz_fdiv_ui(probe.get_mpz_t(), J.d))))
          return BlockStatus::leaves_digit_set;
        probe /= J.d;
      }
      out = lo_block;
      return BlockStatus::ok;
    }
  }
  return BlockStatus::undetermined;
}

inline Int shifted_block(const TimesDSet& J, const DigitStream& x, const Rational& shift,
                         std::size_t n, const RationalIFS& ifs) {
  Int out;
  switch (shifted_block_status(J, x, shift, n, ifs, out)) {
    case BlockStatus::ok:
      return out;
    case BlockStatus::out_of_range:
      throw err_invalid_translate("x + p0/q0 is outside [0,1]");
    case BlockStatus::leaves_digit_set:
      throw err_invalid_translate("digits of x + p0/q0 leave the digit set within depth " +
                                  std::to_string(n));
    case BlockStatus::undetermined:
      throw err_invalid_translate("digits of x + p0/q0 undetermined at enclosure cap");
  }
  throw err_invalid_translate("unreachable");
}

}  // namespace detail

/*
 * Denominator-bounded approximation of y (given through the digit stream of
 * x + y) by rationals in the translated set: splice the first n digits of
 * x + y onto the tail of x + p0/q0.  The splice point z_n lies in the set,
 * shares n digits with x + y, and differs from x + p0/q0 by a multiple of
 * d^{-n}; hence approx = z_n - x has denominator at most q0 d^n and
 * |y - approx| <= d^{-n}, both exact.
 */
inline TranslateApproximant translate_approximant(const TimesDSet& J, const DigitStream& x,
                                                  const DigitStream& xy, const Rational& p0q0,
                                                  std::size_t n) {
  RationalIFS ifs = J.ifs();
  Int dn = int_pow(Int(J.d), n);
  Int A = detail::stream_block(J, xy, n);
  Int B = detail::shifted_block(J, x, p0q0, n, ifs);  // validates digits against E

  TranslateApproximant out;
  out.r_n = Rational(A - B, dn);
  out.approx = p0q0 + out.r_n;
  out.denom_bound = p0q0.den() * dn;
  out.error_bound = Rational(1, dn);
  return out;
}

struct TranslateCandidate {
  Rational value;    // p/q, reduced
  bool confirmed;    // q a power of d and x + p/q fully verified in the set
  bool undetermined; // digit test hit the enclosure cap (kept conservatively)
};

/*
 * All reduced p/q with q <= q_bound whose translate x + p/q survives the
 * digit test to `depth`.  Survivors with q a power of d can be verified
 * completely: adding p/d^k rewrites only the first k digits, so the tail
 * stays in the set and the finite prefix decides membership.
 */
inline std::vector<TranslateCandidate> scan_translate_rationals(const TimesDSet& J,
                                                                const DigitStream& x,
                                                                const Int& q_bound,
                                                                std::size_t depth) {
  if (q_bound < 1) throw err_invalid_argument("q_bound must be >= 1");
  RationalIFS ifs = J.ifs();
  Interval hull = ifs.hull();
  std::size_t base_depth = depth + 16;
  Interval xe = ifs.point_enclosure([&](std::size_t i) { return x.at(i); }, base_depth);
  std::optional<Rational> x_exact;
  if (auto w = x.periodic_form()) x_exact = ifs.eval(*w);

  auto digit_test = [&](const Rational& pq, bool& undetermined) -> bool {
    undetermined = false;
    Int block;
    switch (detail::shifted_block_status(J, x, pq, depth, ifs, block)) {
      case detail::BlockStatus::ok:
        return true;
      case detail::BlockStatus::undetermined:
        undetermined = true;  // cannot rule the candidate out at this depth
        return true;
      default:
        return false;
    }
  };

  auto is_power_of_d = [&](const Int& q) {
    Int v = q;
    while (v % J.d == 0) v /= J.d;
    return v == 1;
  };

  std::vector<TranslateCandidate> out;
  for (Int q = 1; q <= q_bound; ++q) {
    // p/q must fit inside hull - x (outer enclosure)
    Rational lo = hull.lo - xe.hi, hi = hull.hi - xe.lo;
    Int p = (lo * Rational(q)).floor();
    for (; Rational(p, q) <= hi; ++p) {
      if (Rational(p, q) < lo) continue;
      if (int_gcd(p, q) != 1) continue;
      bool undetermined = false;
      if (!digit_test(Rational(p, q), undetermined)) continue;

      /*
       * Full verification is possible exactly when q = d^k: the translate
       * rewrites the first k digits to prefix + p and keeps the tail, so the
       * finite block decides membership outright.  x + p/q = 1 needs the
       * all-(d-1) representation and is decidable only for exact x.
       */
      bool confirmed = false;
      if (is_power_of_d(q)) {
        std::size_t kl = 0;
        for (Int v = q; v > 1; v /= J.d) ++kl;
        Int dk = int_pow(Int(J.d), kl);
        if (x_exact && *x_exact + Rational(p, q) == Rational(1)) {
          confirmed = J.allows(J.d - 1);
        } else {
          Int B = detail::stream_block(J, x, kl) + p;
          if (B >= 0 && B < dk) {
            bool ok = true;
            Int probe = B;
            for (std::size_t i = 0; i < kl && ok; ++i) {
              ok = J.allows(static_cast<unsigned>(mpz_fdiv_ui(probe.get_mpz_t(), J.d)));
              probe /= J.d;
            }
            confirmed = ok;
          }
        }
      }
      out.push_back(TranslateCandidate{Rational(p, q).reduced(), confirmed, undetermined});
    }
  }
  return out;
}

// similarity dimension of the k-block avoidance subsystem:
// ((k-1) log #E + log(#E - 1)) / (k log d)
inline double avoidance_dimension(const TimesDSet& J, unsigned k) {
  if (k < 1) throw err_invalid_argument("avoidance order k must be >= 1");
  if (J.digits.size() < 2) throw err_invalid_argument("avoidance needs at least two digits");
  double E = static_cast<double>(J.digits.size());
  return ((k - 1) * std::log(E) + std::log(E - 1.0)) /
         (k * std::log(static_cast<double>(J.d)));
}

struct PairViolation {
  std::size_t n;  // 0-based start of the maximal match
  std::size_t r;  // its length
};

/*
 * Maximal equality runs between two digit streams within the first `depth`
 * letters: every run [n, n+r) with a mismatch (or the boundary) on both sides
 * is reported when its length beats the budget, r > K + Psi(n).  Identical
 * streams give the single run (0, depth).
 */
inline std::vector<PairViolation> repeat_scan_pair(const TimesDSet& J, const DigitStream& omega,
                                                   const DigitStream& tau, std::size_t depth,
                                                   const std::function<double(std::size_t)>& Psi,
                                                   double K) {
  if (depth < 1) throw err_invalid_argument("scan depth must be >= 1");
  std::size_t letters = J.digits.size();
  std::vector<PairViolation> out;
  std::size_t i = 0;
  while (i < depth) {
    Letter a = omega.at(i), b = tau.at(i);
    if (a >= letters || b >= letters)
      throw err_invalid_letter("stream letter out of range for this digit set");
    if (a != b) {
      ++i;
      continue;
    }
    std::size_t n = i;
    while (i < depth && omega.at(i) == tau.at(i)) {
      if (omega.at(i) >= letters || tau.at(i) >= letters)
        throw err_invalid_letter("stream letter out of range for this digit set");
      ++i;
    }
    std::size_t r = i - n;
    if (static_cast<double>(r) > K + Psi(n)) out.push_back(PairViolation{n, r});
  }
  return out;
}

/*
 * Explicit IFS for the avoidance subsystem: all length-k blocks over E whose
 * final digit is not the avoided one, each contracting by d^{-k}.  Used as an
 * independent route to the dimension formula.
 */
inline RationalIFS avoidance_block_ifs(const TimesDSet& J, unsigned k, unsigned avoided_digit) {
  if (k < 1) throw err_invalid_argument("avoidance order k must be >= 1");
  if (!J.allows(avoided_digit)) throw err_invalid_argument("avoided digit must lie in E");
  if (J.digits.size() < 2) throw err_invalid_argument("avoidance needs at least two digits");
  Int dk = int_pow(Int(J.d), k);
  std::vector<AffineMap> maps;
  std::vector<unsigned> idx(k, 0);
  while (true) {
    unsigned last = J.digits[idx[k - 1]];
    if (last != avoided_digit) {
      Int val = 0;
      for (unsigned i = 0; i < k; ++i) val = val * J.d + J.digits[idx[i]];
      maps.emplace_back(1, dk, val);
    }
    unsigned pos = k;
    while (pos-- > 0) {
      if (++idx[pos] < J.digits.size()) break;
      idx[pos] = 0;
      if (pos == 0) return RationalIFS(std::move(maps));
    }
  }
}

}  // namespace rifs
