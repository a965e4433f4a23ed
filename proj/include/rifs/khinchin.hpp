#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/ifs.hpp"
#include "rifs/pool.hpp"
#include "rifs/repeats.hpp"
#include "rifs/rng.hpp"
#include "rifs/stream.hpp"

namespace rifs {

/*
 * Power-log approximation functions psi(q) = A * q^a * (log q)^b on [2, inf).
 * Restricting to this family keeps every series below decidable in closed
 * form; the scans only ever need psi through Psi(t) = -log psi(e^t).
 */
struct PsiFamily {
  double A, a, b;

  PsiFamily(double A_, double a_, double b_) : A(A_), a(a_), b(b_) {
    if (!(A > 0) || !std::isfinite(A) || !std::isfinite(a) || !std::isfinite(b))
      throw err_invalid_argument("psi family needs finite parameters and A > 0");
  }

  double log_psi_at(double logq) const {
    return std::log(A) + a * logq + b * std::log(logq);
  }
  double log_psi(double q) const { return log_psi_at(std::log(q)); }
  double psi(double q) const { return std::exp(log_psi(q)); }

  // -log psi(e^t), the repeat-length budget at prefix pseudolength t > 0
  double Psi(double t) const { return -std::log(A) - a * t - b * std::log(t); }
  double Psi_d(double n, double d) const { return Psi(n * std::log(d)) / std::log(d); }

  bool slowly_varying() const { return a == 0; }
  bool bounded() const { return a < 0 || (a == 0 && b <= 0); }

  // infimum of psi over [2, inf), in closed form
  double min_value() const {
    if (a < 0 || (a == 0 && b < 0)) return 0;
    if (a == 0) return b == 0 ? A : psi(2);
    if (b >= 0) return psi(2);
    double tstar = -b / a;  // interior critical point of a*t + b*log(t)
    if (tstar <= std::log(2.0)) return psi(2);
    return A * std::exp(a * tstar + b * std::log(tstar));
  }
};

// power dimension functions f(t) = t^s only
struct DimensionFunction {
  double s;
  explicit DimensionFunction(double s_) : s(s_) {
    if (!(s > 0) || !std::isfinite(s))
      throw err_invalid_argument("dimension function exponent must be positive");
  }
  double operator()(double t) const { return std::pow(t, s); }
};

enum class SeriesVerdict { converges, diverges };

inline const char* series_verdict_name(SeriesVerdict v) {
  return v == SeriesVerdict::converges ? "Converges" : "Diverges";
}

struct SeriesReport {
  SeriesVerdict verdict;
  std::vector<std::pair<double, double>> partial_sums;  // (q, sum through q) at 10^k checkpoints
  double total = 0;
  std::uint64_t skipped = 0;  // terms dropped for |log psi(q)| < 1e-12
};

namespace detail {
inline void require_delta(double delta) {
  if (!(delta > 0) || delta > 1 || !std::isfinite(delta))
    throw err_invalid_argument("delta must lie in (0, 1]");
}
}  // namespace detail

/*
 * Series sum over q >= 2 of log(q) * psi(q)^delta / q, the criterion whose
 * convergence makes almost every point badly symbolically approximable.  The
 * term behaves like (log q)^(1 + delta*b) * q^(delta*a - 1), so it converges
 * exactly when delta*a < 0, or a = 0 and the log exponent is below -1.
 */
inline SeriesReport classify_series_badly(const PsiFamily& psi, double delta,
                                          std::uint64_t q_limit = 1000000) {
  detail::require_delta(delta);
  if (q_limit < 2) throw err_invalid_argument("q_limit must be >= 2");
  SeriesReport rep;
  rep.verdict = (delta * psi.a < 0 || (psi.a == 0 && 1 + delta * psi.b < -1))
                    ? SeriesVerdict::converges
                    : SeriesVerdict::diverges;
  double sum = 0;
  std::uint64_t checkpoint = 10;
  for (std::uint64_t q = 2; q <= q_limit; ++q) {
    double lq = std::log(static_cast<double>(q));
    sum += lq * std::exp(delta * psi.log_psi_at(lq)) / static_cast<double>(q);
    if (q == checkpoint || q == q_limit) {
      rep.partial_sums.emplace_back(static_cast<double>(q), sum);
      if (q == checkpoint) checkpoint *= 10;
    }
  }
  rep.total = sum;
  return rep;
}

/*
 * Series sum of log(q) * psi(q)^delta / (q * |log psi(q)|), the
 * well-approximable criterion.  log psi is negative for decaying psi, so the
 * magnitude is used; a psi that never falls below 1 leaves the series with no
 * meaningful sign and is refused.  Terms with |log psi| below 1e-12 (the sign
 * crossing of psi through 1) are skipped and counted.
 */
inline SeriesReport classify_series_well(const PsiFamily& psi, double delta,
                                         std::uint64_t q_limit = 1000000) {
  detail::require_delta(delta);
  if (q_limit < 2) throw err_invalid_argument("q_limit must be >= 2");
  if (psi.min_value() >= 1.0)
    throw err_undefined_series("psi(q) >= 1 for every q >= 2; |log psi| cannot weight the series");

  SeriesReport rep;
  if (psi.a < 0)
    rep.verdict = SeriesVerdict::converges;
  else if (psi.a > 0)
    rep.verdict = SeriesVerdict::diverges;
  else if (psi.b != 0)
    rep.verdict = delta * psi.b < -2 ? SeriesVerdict::converges : SeriesVerdict::diverges;
  else
    rep.verdict = SeriesVerdict::diverges;  // psi constant below 1

  double sum = 0;
  std::uint64_t checkpoint = 10;
  for (std::uint64_t q = 2; q <= q_limit; ++q) {
    double lq = std::log(static_cast<double>(q));
    double lp = psi.log_psi_at(lq);
    if (std::abs(lp) < 1e-12) {
      ++rep.skipped;
    } else {
      sum += lq * std::exp(delta * lp) / (static_cast<double>(q) * std::abs(lp));
    }
    if (q == checkpoint || q == q_limit) {
      rep.partial_sums.emplace_back(static_cast<double>(q), sum);
      if (q == checkpoint) checkpoint *= 10;
    }
  }
  rep.total = sum;
  return rep;
}

enum class LsvVerdict { zero, full };

inline const char* lsv_verdict_name(LsvVerdict v) { return v == LsvVerdict::zero ? "Zero" : "Full"; }

struct LsvReport {
  LsvVerdict verdict;
  SeriesVerdict series;
  std::vector<std::pair<double, double>> partial_sums;  // (n, sum through n)
  double total = 0;
};

/*
 * Series sum over n >= 1 of f(psi(d^n)/d^n) * d^(n*delta) with f(t) = t^s.
 * The n-th term has log  s*log psi(d^n) + n*log(d)*(delta - s), i.e. geometric
 * rate a*s + delta - s in the exponent of d; convergence decides a zero/full
 * dichotomy for the f-measure of the well-approximable set.
 */
inline LsvReport lsv_series(const PsiFamily& psi, const DimensionFunction& f, std::uint32_t d,
                            double delta, std::uint32_t n_limit = 60) {
  if (d < 2) throw err_invalid_argument("base d must be >= 2");
  if (n_limit < 1) throw err_invalid_argument("n_limit must be >= 1");
  detail::require_delta(delta);

  double rate = psi.a * f.s + delta - f.s;
  SeriesVerdict sv = (rate < 0 || (rate == 0 && psi.b * f.s < -1)) ? SeriesVerdict::converges
                                                                   : SeriesVerdict::diverges;
  LsvReport rep;
  rep.series = sv;
  rep.verdict = sv == SeriesVerdict::converges ? LsvVerdict::zero : LsvVerdict::full;

  double logd = std::log(static_cast<double>(d));
  double sum = 0;
  for (std::uint32_t n = 1; n <= n_limit; ++n) {
    double log_term = f.s * psi.log_psi_at(n * logd) + n * logd * (delta - f.s);
    sum += std::exp(log_term);
    rep.partial_sums.emplace_back(static_cast<double>(n), sum);
  }
  rep.total = sum;
  return rep;
}

struct SelfRepeat {
  std::size_t pos;     // start of the second occurrence, 0-based
  std::size_t length;  // maximal repeated length at pos
  std::size_t prev;    // one earlier start of the same block
  double excess;       // pseudolength(block) - Psi(pseudolength of the first pos letters)
};

struct SelfScanResult {
  std::vector<SelfRepeat> violations;  // excess > K, in position order
  double badness = -std::numeric_limits<double>::infinity();  // max excess over all repeats
  std::size_t repeats = 0;  // positions with any earlier occurrence
};

/*
 * Scan the first `depth` letters for blocks that occur twice (overlap
 * allowed).  For a second occurrence starting at j the excess is maximal at
 * the longest previous factor, so one entry per position j captures every
 * violation at j; position sets are monotone in depth because a longer prefix
 * can only lengthen previous factors.
 */
inline SelfScanResult repeat_scan_self(const RationalIFS& ifs, const DigitStream& stream,
                                       std::size_t depth, const PsiFamily& psi, double K) {
  if (depth < 2) throw err_invalid_argument("scan depth must be >= 2");
  FiniteWord text = stream.prefix(depth);
  for (Letter l : text)
    if (l >= ifs.alphabet_size())
      throw err_invalid_letter("stream letter out of range for this alphabet");

  auto lpf = longest_previous_factor(text);
  std::vector<double> P(depth + 1, 0.0);
  for (std::size_t i = 0; i < depth; ++i) P[i + 1] = P[i] + ifs.log_q(text[i]);

  SelfScanResult res;
  for (std::size_t j = 1; j < depth; ++j) {
    if (lpf[j].length <= 0) continue;
    ++res.repeats;
    auto r = static_cast<std::size_t>(lpf[j].length);
    double excess = (P[j + r] - P[j]) - psi.Psi(P[j]);
    if (excess > res.badness) res.badness = excess;
    if (excess > K)
      res.violations.push_back(SelfRepeat{j, r, static_cast<std::size_t>(lpf[j].prev), excess});
  }
  return res;
}

// i.i.d. letter weights lambda_a^delta of the natural measure
inline std::vector<double> natural_weights(const RationalIFS& ifs, double delta) {
  std::vector<double> w;
  for (const auto& u : ifs.maps()) w.push_back(std::exp(delta * u.contraction().log()));
  return w;
}

struct RepeatProbability {
  double freq = 0;
  double bound = 0;  // e^(-delta * ell0)
  double se = 0;     // binomial standard error
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

/*
 * Frequency of the event "the letters from position n and from position n+m
 * agree on an initial run of pseudolength >= ell0" under the natural measure.
 * A run reaching ell0 needs at most ceil(ell0 / min log q) letters, so the
 * horizon n + m + that + 1 decides the event for every sample path.
 */
inline RepeatProbability mc_repeat_probability(const RationalIFS& ifs, std::size_t n,
                                               std::size_t m, double ell0, std::uint64_t trials,
                                               std::uint64_t seed, unsigned threads = 1) {
  if (trials < 1) throw err_invalid_argument("trials must be >= 1");
  if (m < 1) throw err_invalid_argument("offset m must be >= 1");
  if (!(ell0 > 0) || !std::isfinite(ell0)) throw err_invalid_argument("ell0 must be positive");

  double delta = ifs.dimension().value;
  WeightedSampler sampler = [&] {
    try {
      return WeightedSampler(natural_weights(ifs, delta));
    } catch (const std::exception& e) {
      throw err_invalid_measure(e.what());
    }
  }();

  auto rstar = static_cast<std::size_t>(std::ceil(ell0 / ifs.min_log_q()));
  std::atomic<std::uint64_t> hits{0};
  parallel_for(trials, threads, [&](std::uint64_t t) {
    std::uint64_t s = rng_substream(seed, t);
    double acc = 0;
    for (std::size_t i = 0; i < rstar; ++i) {
      auto x = static_cast<Letter>(sampler.sample(s, n + i));
      auto y = static_cast<Letter>(sampler.sample(s, n + m + i));
      if (x != y) break;
      acc += ifs.log_q(x);
      if (acc >= ell0) {
        hits.fetch_add(1, std::memory_order_relaxed);
        break;
      }
    }
  });

  RepeatProbability out;
  out.hits = hits.load();
  out.trials = trials;
  out.freq = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.bound = std::exp(-delta * ell0);
  out.se = std::sqrt(out.freq * (1.0 - out.freq) / static_cast<double>(trials));
  return out;
}

struct McTrialRow {
  std::uint64_t trial;
  double max_excess;
  std::size_t violations;
  std::size_t repeats;
};

struct McQuantiles {
  double min, q25, median, q75, max, mean;
};

struct McSummary {
  std::vector<McTrialRow> rows;  // in trial order
  McQuantiles excess{};          // over max_excess; NaNs when rows are empty
};

inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  double idx = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(idx);
  double frac = idx - static_cast<double>(lo);
  if (frac == 0 || lo + 1 >= sorted.size()) return sorted[lo];
  return sorted[lo] * (1 - frac) + sorted[lo + 1] * frac;
}

/*
 * Max-excess distribution of repeat_scan_self over seeded natural-measure
 * streams.  One row per trial, merged in trial order; quantiles summarize the
 * empirical badness constants at this depth.
 */
inline McSummary mc_khinchin_experiment(const RationalIFS& ifs, const PsiFamily& psi,
                                        std::uint64_t trials, std::size_t depth,
                                        std::uint64_t seed, double K = 0.0,
                                        unsigned threads = 1) {
  McSummary out;
  double nan = std::numeric_limits<double>::quiet_NaN();
  out.excess = McQuantiles{nan, nan, nan, nan, nan, nan};
  if (trials == 0) return out;
  if (depth < 2) throw err_invalid_argument("scan depth must be >= 2");

  double delta = ifs.dimension().value;
  std::vector<double> weights = natural_weights(ifs, delta);
  out.rows.resize(trials);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    auto stream = DigitStream::weighted(rng_substream(seed, t), weights);
    SelfScanResult scan = repeat_scan_self(ifs, stream, depth, psi, K);
    out.rows[t] = McTrialRow{t, scan.badness, scan.violations.size(), scan.repeats};
  });

  std::vector<double> ex;
  ex.reserve(trials);
  for (const auto& row : out.rows) ex.push_back(row.max_excess);
  std::sort(ex.begin(), ex.end());
  double mean = 0;
  for (double v : ex) mean += v;
  out.excess = McQuantiles{ex.front(),
                           quantile_sorted(ex, 0.25),
                           quantile_sorted(ex, 0.5),
                           quantile_sorted(ex, 0.75),
                           ex.back(),
                           mean / static_cast<double>(ex.size())};
  return out;
}

}  // namespace rifs
