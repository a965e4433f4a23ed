#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rifs/coding.hpp"
#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/factor.hpp"
#include "rifs/ifs.hpp"
#include "rifs/manifest.hpp"
#include "rifs/pool.hpp"
#include "rifs/rng.hpp"
#include "rifs/times_d.hpp"

namespace rifs {

/*
 * One reduced rational of the middle-thirds set.  r and m are the preperiod
 * and primitive period of its ternary expansion (m = 1 with repeating digit 0,
 * flagged `terminating`, when q_red is a power of 3); the word and intrinsic
 * denominator come from the symbolic coding, whose preperiod/period lengths
 * coincide with (r, m).  ratio = m / log(q_red) is the period-growth statistic
 * and is undefined (NaN, serialized null) for q_red = 1.
 */
struct CensusRecord {
  Int p, q_red;
  int n_bucket = 0;  // 3^{n-1} <= q_red < 3^n
  Int r, m;
  bool terminating = false;
  Int q_int;
  EventuallyPeriodicWord word;
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// digits of p/q in base 3 by long division, rejecting on the first digit 1;
// complete scan needs at most preperiod + period steps, both below `steps`
inline bool cantor_digits_ok_u64(std::uint64_t p, std::uint64_t q, std::uint64_t steps) {
  std::uint64_t rem = p;
  for (std::uint64_t i = 0; i < steps; ++i) {
    rem *= 3;
    std::uint64_t digit = rem / q;
    rem %= q;
    if (digit == 1) return false;
    if (rem == 0) return true;  // terminating tail of zeros
  }
  return true;
}

}  // namespace detail

/*
 * Membership of p/q (0 <= p <= q, gcd 1) in the middle-thirds set by direct
 * long division, consulting the dual expansion for p / 3^r.  Independent of
 * the interval-coding route on purpose: the census cross-checks the two.
 */
inline bool cantor_member_u64(std::uint64_t p, std::uint64_t q) {
  if (q == 0) throw err_invalid_argument("q must be positive");
  if (p > q) return false;
  if (q > (std::numeric_limits<std::uint64_t>::max)() / 3)
    throw err_out_of_range("denominator too large for the u64 membership path");
  if (q == 1) return true;  // 0 -> (0)^inf, 1 -> (2)^inf

  // split q = 3^r * s with gcd(s, 3) = 1
  std::uint64_t s = q;
  unsigned r = 0;
  while (s % 3 == 0) {
    s /= 3;
    ++r;
  }
  if (s == 1) {
    // terminating: digits of p to r places; last digit is never 0 (gcd(p,3)=1)
    std::vector<unsigned> dig(r);
    std::uint64_t v = p;
    for (unsigned i = r; i-- > 0;) {
      dig[i] = static_cast<unsigned>(v % 3);
      v /= 3;
    }
    bool primary = true;
    for (unsigned dgt : dig) primary = primary && dgt != 1;
    if (primary) return true;
    // dual form: last digit drops by one, then repeating 2s
    bool dual = dig[r - 1] == 1;
    for (unsigned i = 0; i + 1 < r && dual; ++i) dual = dig[i] != 1;
    return dual;
  }
  // expansion is eventually periodic and unique; r + period(<= s) digits suffice
  return detail::cantor_digits_ok_u64(p, q, static_cast<std::uint64_t>(r) + s + 1);
}

// assemble the full record for a known member of the middle-thirds set
inline CensusRecord make_cantor_record(const RationalIFS& cantor, const Rational& x) {
  Rational xr = x.reduced();
  auto [r, m] = period_of(3, xr);
  auto coded = code_rational(cantor, xr);
  if (!coded.ok()) throw err_invalid_argument("not a member: " + xr.str());

  CensusRecord rec;
  rec.p = xr.num();
  rec.q_red = xr.den();
  rec.r = r;
  rec.m = m;
  rec.terminating = d_part_split(3, xr.den()).second == 1;
  rec.q_int = coded.coded->q_int;
  rec.word = coded.coded->word;
  int n = 1;
  Int bound = 3;
  while (bound <= rec.q_red) {
    bound *= 3;
    ++n;
  }
  rec.n_bucket = n;
  if (rec.q_red >= 2)
    rec.ratio = m.get_d() / log_big(rec.q_red);
  return rec;
}

// all reduced p/q in the middle-thirds set with q in [q_lo, q_hi), p in [0, q]
inline std::vector<CensusRecord> brute_census_range(const Int& q_lo, const Int& q_hi) {
  if (q_lo < 1) throw err_invalid_argument("denominator range must start at 1");
  if (!q_hi.fits_ulong_p())
    throw err_out_of_range("denominator range too large for the brute-force path");
  RationalIFS cantor = RationalIFS::cantor();
  std::vector<CensusRecord> out;
  for (std::uint64_t q = q_lo.get_ui(); q < q_hi.get_ui(); ++q) {
    for (std::uint64_t p = 0; p <= q; ++p) {
      if (int_gcd(Int(p), Int(q)) != 1) continue;
      if (!cantor_member_u64(p, q)) continue;
      out.push_back(make_cantor_record(cantor, Rational(Int(p), Int(q))));
    }
  }
  return out;
}

// split [3^{n-1}, 3^n) into at most `parts` contiguous denominator ranges
inline std::vector<std::pair<Int, Int>> brute_shards(int n, int parts = 16) {
  if (n < 1) throw err_invalid_argument("bucket index n must be >= 1");
  if (parts < 1) throw err_invalid_argument("shard count must be >= 1");
  Int lo = n == 1 ? Int(1) : int_pow(3, static_cast<unsigned>(n - 1));
  Int hi = int_pow(3, static_cast<unsigned>(n));
  Int total = hi - lo;
  if (total < parts) parts = static_cast<int>(total.get_ui());
  std::vector<std::pair<Int, Int>> shards;
  for (int i = 0; i < parts; ++i) {
    Int a = lo + (total * i) / parts;
    Int b = lo + (total * (i + 1)) / parts;
    if (a < b) shards.emplace_back(a, b);
  }
  return shards;
}

/*
 * Complete S_n: every reduced p/q in the middle-thirds set with
 * 3^{n-1} <= q < 3^n (q = 1 joins the n = 1 bucket, so 0 and 1 are records).
 * Deterministic (q, p) order regardless of thread count.
 */
inline std::vector<CensusRecord> brute_census(int n, unsigned threads = 1) {
  auto shards = brute_shards(n);
  std::vector<std::vector<CensusRecord>> slots(shards.size());
  parallel_for(shards.size(), threads, [&](std::uint64_t i) {
    slots[i] = brute_census_range(shards[i].first, shards[i].second);
  });
  std::vector<CensusRecord> out;
  for (auto& slot : slots)
    for (auto& rec : slot) out.push_back(std::move(rec));
  return out;
}

/*
 * Every member with ternary preperiod <= R and primitive period <= M, capped
 * at q_red <= q_bound: digit blocks a over {0,2}^r and primitive b over
 * {0,2}^m give x = (a(3^m - 1) + b) / (3^r (3^m - 1)).  Deduped by reduced
 * fraction, emitted in (q_red, p) order.  Complete for its (R, M) box by
 * construction, which is what makes it an independent oracle for the
 * long-division census.
 */
inline std::vector<CensusRecord> divisor_census(unsigned max_period, unsigned max_preperiod,
                                                const Int& q_bound) {
  if (max_period < 1) throw err_invalid_argument("max period must be >= 1");
  if (q_bound < 1) throw err_invalid_argument("q bound must be >= 1");
  RationalIFS cantor = RationalIFS::cantor();

  std::unordered_set<std::string> seen;
  std::vector<CensusRecord> out;

  auto blocks = [](unsigned len) {
    // all digit vectors over {0,2} of the given length, lexicographic
    std::vector<std::vector<unsigned>> all;
    std::vector<unsigned> cur(len, 0);
    while (true) {
      all.push_back(cur);
      unsigned pos = len;
      bool done = len == 0;
      while (pos-- > 0) {
        if (cur[pos] == 0) {
          cur[pos] = 2;
          break;
        }
        cur[pos] = 0;
        if (pos == 0) done = true;
      }
      if (done) break;
    }
    return all;
  };

  for (unsigned r = 0; r <= max_preperiod; ++r) {
    auto pre_blocks = blocks(r);
    for (unsigned m = 1; m <= max_period; ++m) {
      Int dm = int_pow(3, m) - 1;
      Int dr = int_pow(3, r);
      for (const auto& per : blocks(m)) {
        FiniteWord probe(per.begin(), per.end());
        if (primitive_period(probe) != m) continue;
        Int B = 0;
        for (unsigned dgt : per) B = B * 3 + dgt;
        for (const auto& pre : pre_blocks) {
          Int A = 0;
          for (unsigned dgt : pre) A = A * 3 + dgt;
          Rational x = Rational(A * dm + B, dr * dm).reduced();
          if (x.den() > q_bound) continue;
          if (!seen.insert(x.key()).second) continue;
          out.push_back(make_cantor_record(cantor, x));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CensusRecord& a, const CensusRecord& b) {
    if (a.q_red != b.q_red) return a.q_red < b.q_red;
    return a.p < b.p;
  });
  return out;
}

/*
 * Period filter S_n^(K): records with m <= K log(q_red).  Rows with q_red = 1
 * have no period statistic and pass vacuously; exceptions are the interior
 * rows that fail.
 */
struct SnKResult {
  std::size_t count_total = 0;   // #S_n including the q = 1 endpoints
  std::size_t count_pass = 0;    // #S_n^(K)
  std::vector<CensusRecord> exceptions;
};

inline SnKResult census_SnK(const std::vector<CensusRecord>& sn, double K) {
  if (!(K >= 0) || !std::isfinite(K)) throw err_invalid_argument("K must be finite and >= 0");
  SnKResult res;
  res.count_total = sn.size();
  for (const auto& rec : sn) {
    if (rec.q_red < 2) {
      ++res.count_pass;
      continue;
    }
    if (rec.m.get_d() <= K * log_big(rec.q_red))
      ++res.count_pass;
    else
      res.exceptions.push_back(rec);
  }
  return res;
}

// log tau(N) * log log N / log N, the Ramanujan growth statistic
inline double ramanujan_ratio(const Int& N, FactorCache* cache = nullptr) {
  if (N < 3) throw err_invalid_argument("ratio needs N >= 3 so that log log N > 0");
  Int tau = 1;
  auto factors = cache ? cache->factorize_cached(N) : factorize(N);
  for (const auto& [prime, e] : factors) {
    (void)prime;
    tau *= Int(e + 1);
  }
  double logN = log_big(N);
  return log_big(tau) * std::log(logN) / logN;
}

struct RamanujanRow {
  unsigned m;
  Int N;  // 3^m - 1
  Int tau;
  double ratio;
};

inline std::vector<RamanujanRow> ramanujan_sweep(unsigned m_max, FactorCache* cache = nullptr) {
  if (m_max < 2) throw err_invalid_argument("sweep needs m_max >= 2");
  std::vector<RamanujanRow> rows;
  for (unsigned m = 2; m <= m_max; ++m) {
    Int N = int_pow(3, m) - 1;
    Int tau = 1;
    auto factors = cache ? cache->factorize_cached(N) : factorize(N);
    for (const auto& [prime, e] : factors) {
      (void)prime;
      tau *= Int(e + 1);
    }
    rows.push_back(RamanujanRow{m, N, tau, log_big(tau) * std::log(log_big(N)) / log_big(N)});
  }
  return rows;
}

/*
 * Per-bucket diagnostics for the growth and period conjectures: counts with
 * and without the q = 1 endpoints, the growth exponent log2(#S_n)/n, the
 * worst period ratio with its witness, and the exception count at the given K.
 */
struct DiagnosticsRow {
  int n = 0;
  std::size_t count_total = 0;
  std::size_t count_interior = 0;  // q_red >= 2 rows
  double growth = 0;               // log2(count_total) / n
  double max_ratio = 0;            // max m / log q over interior rows, 0 if none
  Int argmax_p, argmax_q;
  std::size_t exceptions = 0;      // at the K passed in
};

inline std::vector<DiagnosticsRow> conjecture_diagnostics(
    const std::vector<std::vector<CensusRecord>>& per_bucket, double K) {
  std::vector<DiagnosticsRow> rows;
  for (std::size_t i = 0; i < per_bucket.size(); ++i) {
    const auto& sn = per_bucket[i];
    DiagnosticsRow row;
    row.n = static_cast<int>(i + 1);
    row.count_total = sn.size();
    for (const auto& rec : sn) {
      if (rec.q_red < 2) continue;
      ++row.count_interior;
      if (rec.ratio > row.max_ratio) {
        row.max_ratio = rec.ratio;
        row.argmax_p = rec.p;
        row.argmax_q = rec.q_red;
      }
    }
    row.growth = sn.empty() ? 0 : std::log2(static_cast<double>(sn.size())) / row.n;
    row.exceptions = census_SnK(sn, K).exceptions.size();
    rows.push_back(row);
  }
  return rows;
}

struct HeuristicRow {
  unsigned m;
  std::uint64_t trials, hits;
  double freq, expected, se, z;
};

/*
 * The heuristic's quantitative core: a uniform ternary block of length m
 * avoids digit 1 with probability (2/3)^m.  One substream per block length;
 * digit j of trial t is draw t*m + j, so thread count cannot change any draw.
 */
inline std::vector<HeuristicRow> heuristic_model_sim(unsigned m_max, std::uint64_t trials,
                                                     std::uint64_t seed, unsigned threads = 1) {
  std::vector<HeuristicRow> rows;
  if (trials == 0) return rows;
  for (unsigned m = 1; m <= m_max; ++m) {
    std::uint64_t sub = rng_substream(seed, m);
    std::atomic<std::uint64_t> hits{0};
    parallel_for(trials, threads, [&](std::uint64_t t) {
      for (unsigned j = 0; j < m; ++j) {
        if (rng_below(sub, t * m + j, 3) == 1) return;
      }
      hits.fetch_add(1, std::memory_order_relaxed);
    });
    HeuristicRow row;
    row.m = m;
    row.trials = trials;
    row.hits = hits.load();
    row.freq = static_cast<double>(row.hits) / static_cast<double>(trials);
    row.expected = std::pow(2.0 / 3.0, m);
    row.se = std::sqrt(row.expected * (1 - row.expected) / static_cast<double>(trials));
    row.z = (row.freq - row.expected) / row.se;
    rows.push_back(row);
  }
  return rows;
}

// ---- serialization ----------------------------------------------------

inline nlohmann::json record_to_json(const CensusRecord& rec) {
  static const RationalIFS cantor = RationalIFS::cantor();
  nlohmann::json j;
  j["p"] = rec.p.get_str();
  j["q"] = rec.q_red.get_str();
  j["n"] = rec.n_bucket;
  j["r"] = rec.r.get_si();
  j["m"] = rec.m.get_si();
  j["q_int"] = rec.q_int.get_str();  // decimal string: 3^r (3^m - 1) outgrows doubles fast
  j["word"] = cantor.render(rec.word);
  j["terminating"] = rec.terminating;
  if (std::isnan(rec.ratio))
    j["ratio"] = nullptr;
  else
    j["ratio"] = rec.ratio;
  return j;
}

inline std::string record_jsonl(const CensusRecord& rec) { return record_to_json(rec).dump(); }

/*
 * Sharded, checkpointed brute census under `dir`: one JSONL file and one
 * checkpoint per denominator range, written atomically (tmp + rename), reused
 * verbatim when the checkpoint says complete.  The merged line sequence is a
 * pure concatenation of shard files in range order, so a resumed run is
 * byte-identical to a fresh one.
 */
struct PersistentCensus {
  std::vector<std::string> lines;        // canonical JSONL lines, in (q, p) order
  std::vector<std::string> shard_files;  // paths relative to dir, in merge order
  int shards_reused = 0, shards_computed = 0;
};

inline PersistentCensus brute_census_persistent(int n, const std::string& dir, unsigned threads,
                                                int shard_count = 16) {
  namespace fs = std::filesystem;
  auto shards = brute_shards(n, shard_count);
  fs::create_directories(fs::path(dir) / "shards");

  struct ShardOut {
    std::vector<std::string> lines;
    bool reused = false;
  };
  std::vector<ShardOut> slots(shards.size());
  std::vector<std::string> names(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i)
    names[i] = "shards/brute_n" + std::to_string(n) + "_" + shards[i].first.get_str() + "_" +
               shards[i].second.get_str() + ".jsonl";

  parallel_for(shards.size(), threads, [&](std::uint64_t i) {
    fs::path data = fs::path(dir) / names[i];
    fs::path ck = data;
    ck += ".ck.json";

    if (fs::exists(ck) && fs::exists(data)) {
      std::ifstream in(ck);
      nlohmann::json j;
      in >> j;
      if (j.value("complete", false)) {
        std::ifstream lines_in(data);
        std::string line;
        while (std::getline(lines_in, line)) slots[i].lines.push_back(line);
        slots[i].reused = true;
        return;
      }
    }

    auto records = brute_census_range(shards[i].first, shards[i].second);
    for (const auto& rec : records) slots[i].lines.push_back(record_jsonl(rec));

    fs::path tmp = data;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw err_bad_file("cannot write " + tmp.string());
      for (const auto& line : slots[i].lines) out << line << "\n";
    }
    fs::rename(tmp, data);

    nlohmann::json j;
    j["q_lo"] = shards[i].first.get_str();
    j["q_hi"] = shards[i].second.get_str();
    j["records"] = slots[i].lines.size();
    j["complete"] = true;
    j["version"] = kToolVersion;
    j["written_at"] = utc_timestamp();
    fs::path cktmp = ck;
    cktmp += ".tmp";
    {
      std::ofstream out(cktmp, std::ios::binary | std::ios::trunc);
      out << j.dump(2) << "\n";
    }
    fs::rename(cktmp, ck);
  });

  PersistentCensus out;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    out.shard_files.push_back(names[i]);
    slots[i].reused ? ++out.shards_reused : ++out.shards_computed;
    for (auto& line : slots[i].lines) out.lines.push_back(std::move(line));
  }
  return out;
}

}  // namespace rifs
