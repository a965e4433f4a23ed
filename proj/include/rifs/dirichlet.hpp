#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/ifs.hpp"
#include "rifs/stream.hpp"
#include "rifs/word.hpp"

namespace rifs {

struct ApproximationResult {
  EventuallyPeriodicWord word;  // pre = first n letters, per = next m letters of the stream
  Rational unreduced;           // eval of word; denominator is the guaranteed one
  Rational reduced;
  Int q_unreduced;
  std::size_t n = 0, m = 0;
  long orbit_budget = 0;  // N: orbit points 0..N were considered
  std::size_t lookahead_used = 0;
  Interval error_enclosure;  // rigorous range for |x - p/q|
  bool error_exact = false;  // stream had an exact value, enclosure is a point
};

/*
 * Pigeonhole approximation of x = pi(stream).  The orbit points pi(sigma^n stream)
 * for n = 0..N, N = floor(log_{q_max} Q), are enclosed in cylinders of
 * `lookahead` letters; the pair (n, n+m) with the smallest exact distance
 * upper bound yields the approximant: preperiod = first n letters, period =
 * the next m.  Ties (equal upper bounds) are broken by doubling the lookahead
 * up to `lookahead_cap`, then by smallest n, then smallest m.
 *
 * Negative slopes can push q_(1)*(q_(2)-p_(2)) above q_(1)*q_(2), so pairs are
 * filtered by the exact integer test q_unreduced <= Q; with every p_a > 0 the
 * filter never rejects anything.
 */
inline ApproximationResult dirichlet_approximate(const RationalIFS& ifs, const DigitStream& stream,
                                                 const Int& Q, std::size_t lookahead = 32,
                                                 std::size_t lookahead_cap = 512) {
  Int qmax = ifs.q_max();
  if (Q < qmax)
    throw err_budget_too_small("Q=" + Q.get_str() + " is below q_max=" + qmax.get_str());
  long N = 0;
  Int power = 1;
  while (power * qmax <= Q) {
    power *= qmax;
    ++N;
  }

  if (lookahead == 0) throw err_invalid_argument("lookahead must be positive");
  if (lookahead_cap < lookahead) lookahead_cap = lookahead;

  struct Pair {
    std::size_t n, m;
    Rational ub;
    Int q;
  };

  std::size_t L = lookahead;
  std::optional<Pair> best;
  while (true) {
    FiniteWord prefixes = stream.prefix(static_cast<std::size_t>(N) + L);
    // composed maps U_n over the first n letters, extended to n + L for cylinders
    std::vector<Interval> orbit;
    for (std::size_t n = 0; n <= static_cast<std::size_t>(N); ++n) {
      FiniteWord window(prefixes.begin() + static_cast<std::ptrdiff_t>(n),
                        prefixes.begin() + static_cast<std::ptrdiff_t>(n + L));
      orbit.push_back(ifs.cylinder(window));
    }

    best.reset();
    bool tie = false;
    for (std::size_t n = 0; n + 1 <= static_cast<std::size_t>(N); ++n) {
      for (std::size_t m = 1; n + m <= static_cast<std::size_t>(N); ++m) {
        FiniteWord pre(prefixes.begin(), prefixes.begin() + static_cast<std::ptrdiff_t>(n));
        FiniteWord per(prefixes.begin() + static_cast<std::ptrdiff_t>(n),
                       prefixes.begin() + static_cast<std::ptrdiff_t>(n + m));
        AffineMap u1 = ifs.compose_word(pre), u2 = ifs.compose_word(per);
        Int q_unred = u1.q * (u2.q - u2.p);
        if (q_unred > Q) continue;
        Rational ub = distance_bounds(orbit[n], orbit[n + m]).hi;
        if (!best || ub < best->ub) {
          best = Pair{n, m, ub, q_unred};
          tie = false;
        } else if (ub == best->ub) {
          tie = true;  // best already holds the lexicographically smaller pair
        }
      }
    }
    if (!best)
      throw err_budget_too_small("no orbit pair satisfies q <= Q (negative slopes at minimal Q)");
    if (!tie || L >= lookahead_cap) break;
    L = std::min(L * 2, lookahead_cap);
  }

  FiniteWord prefixes = stream.prefix(best->n + best->m);
  FiniteWord pre(prefixes.begin(), prefixes.begin() + static_cast<std::ptrdiff_t>(best->n));
  FiniteWord per(prefixes.begin() + static_cast<std::ptrdiff_t>(best->n), prefixes.end());
  EventuallyPeriodicWord word(pre, per);

  ApproximationResult res;
  res.word = word;
  res.unreduced = ifs.eval(word);
  res.reduced = res.unreduced.reduced();
  res.q_unreduced = res.unreduced.den();
  res.n = best->n;
  res.m = best->m;
  res.orbit_budget = N;
  res.lookahead_used = L;

  if (auto exact = stream.periodic_form()) {
    Rational x = ifs.eval(*exact);
    Rational err = (x - res.unreduced).abs();
    res.error_enclosure = Interval(err, err);
    res.error_exact = true;
  } else {
    std::size_t depth = best->n + best->m + 2 * L;
    Interval x_enc = ifs.point_enclosure([&](std::size_t i) { return stream.at(i); }, depth);
    res.error_enclosure = abs_offset(x_enc, res.unreduced);
  }
  return res;
}

// measured constant in |x - p/q| <= K q^{gamma-1} (log Q)^{-1/delta}, by-q normalization
inline double approximation_quality(const ApproximationResult& r, const Int& Q, double delta,
                                    double gamma) {
  double err = r.error_enclosure.hi.to_double();
  double qfac = std::exp((1.0 - gamma) * log_big(r.q_unreduced));
  return err * qfac * std::pow(log_big(Q), 1.0 / delta);
}

// same constant normalized by Q instead of the achieved q
inline double approximation_quality_by_Q(const ApproximationResult& r, const Int& Q, double delta,
                                         double gamma) {
  double err = r.error_enclosure.hi.to_double();
  double qfac = std::exp((1.0 - gamma) * log_big(Q));
  return err * qfac * std::pow(log_big(Q), 1.0 / delta);
}

struct ScanRow {
  Int Q;
  Int q_unreduced;
  std::size_t n, m;
  double error_ub;
  double K_by_q;
  double K_by_Q;
};

inline std::vector<ScanRow> dirichlet_scan(const RationalIFS& ifs, const DigitStream& stream,
                                           const std::vector<Int>& budgets,
                                           std::size_t lookahead = 32) {
  double delta = ifs.dimension().value;
  double gamma = ifs.gamma();
  std::vector<ScanRow> rows;
  for (const Int& Q : budgets) {
    ApproximationResult r = dirichlet_approximate(ifs, stream, Q, lookahead);
    rows.push_back(ScanRow{Q, r.q_unreduced, r.n, r.m, r.error_enclosure.hi.to_double(),
                           approximation_quality(r, Q, delta, gamma),
                           approximation_quality_by_Q(r, Q, delta, gamma)});
  }
  return rows;
}

}  // namespace rifs
