/*
 * Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
 * FAIL.  Usage: acceptance <path-to-cli-binary>.  Tolerances and budgets are
 * pinned here on purpose; nothing here reads configuration.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "rifs/census.hpp"
#include "rifs/coding.hpp"
#include "rifs/dirichlet.hpp"
#include "rifs/ifs.hpp"
#include "rifs/khinchin.hpp"
#include "rifs/stream.hpp"
#include "rifs/times_d.hpp"

using namespace rifs;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double micros_since(Clock::time_point t0) { return seconds_since(t0) * 1e6; }

EventuallyPeriodicWord random_word(std::uint64_t seed, std::uint64_t i, std::size_t alphabet) {
  std::uint64_t sub = rng_substream(seed, i);
  std::size_t npre = rng_below(sub, 0, 5);
  std::size_t nper = 1 + rng_below(sub, 1, 7);
  FiniteWord pre, per;
  for (std::size_t k = 0; k < npre; ++k)
    pre.push_back(static_cast<Letter>(rng_below(sub, 10 + k, alphabet)));
  for (std::size_t k = 0; k < nper; ++k)
    per.push_back(static_cast<Letter>(rng_below(sub, 100 + k, alphabet)));
  return EventuallyPeriodicWord(pre, per);
}

// digit periodicity straight from long division, no number theory involved
std::pair<std::uint64_t, std::uint64_t> observed_period(unsigned d, std::uint64_t p,
                                                        std::uint64_t q) {
  const std::uint64_t unseen = ~0ull;
  std::vector<std::uint64_t> seen(q, unseen);
  std::uint64_t rem = p % q, step = 0;
  while (seen[rem] == unseen) {
    seen[rem] = step++;
    rem = rem * d % q;
  }
  return {seen[rem], step - seen[rem]};
}

std::set<std::string> fraction_set(const std::vector<CensusRecord>& records) {
  std::set<std::string> out;
  for (const auto& rec : records) out.insert(rec.p.get_str() + "/" + rec.q_red.get_str());
  return out;
}

// buckets 1..6 are shared by criteria 4 and 5; computed once
const std::vector<std::vector<CensusRecord>>& census6() {
  static std::vector<std::vector<CensusRecord>> buckets = [] {
    std::vector<std::vector<CensusRecord>> b;
    for (int n = 1; n <= 6; ++n) b.push_back(brute_census(n));
    return b;
  }();
  return buckets;
}

void crit1_intrinsic_denominator() {
  RationalIFS ifs = RationalIFS::cantor();
  Rational x(1, 4);
  (void)code_rational(ifs, x);  // warm up
  auto t0 = Clock::now();
  auto got = code_rational(ifs, x);
  double us = micros_since(t0);
  bool ok = got.ok() && got.coded->q_int == 8 && got.coded->q_red == 4 && us < 1000.0;
  report(1, ok,
         "1/4 codes with q_int=" + (got.ok() ? got.coded->q_int.get_str() : "?") +
             " q_red=" + (got.ok() ? got.coded->q_red.get_str() : "?") + " in " + num(us) + "us");
}

void crit2_dimension() {
  RationalIFS ifs = RationalIFS::cantor();
  (void)ifs.dimension();
  auto t0 = Clock::now();
  auto dim = ifs.dimension();
  double us = micros_since(t0);
  double target = std::log(2.0) / std::log(3.0);
  bool ok = std::abs(dim.value - target) <= 1e-12 && dim.iterations <= 60 && us < 1000.0;
  report(2, ok,
         "dimension=" + num(dim.value) + " |err|=" + num(std::abs(dim.value - target)) + " in " +
             std::to_string(dim.iterations) + " iterations, " + num(us) + "us");
}

void crit3_dirichlet_grid() {
  RationalIFS ifs = RationalIFS::cantor();
  double delta = ifs.dimension().value;
  std::vector<Int> budgets;
  for (unsigned e = 5; e <= 14; ++e) budgets.push_back(int_pow(3, e));

  auto t0 = Clock::now();
  bool q_fits = true;
  double max_lo = 0, max_top = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    DigitStream stream = DigitStream::random(seed, 2);
    for (std::size_t k = 0; k < budgets.size(); ++k) {
      ApproximationResult r = dirichlet_approximate(ifs, stream, budgets[k]);
      q_fits = q_fits && r.q_unreduced <= budgets[k];
      double K = approximation_quality(r, budgets[k], delta, 0.0);
      double& slot = k + 1 < budgets.size() ? max_lo : max_top;
      slot = std::max(slot, K);
    }
  }
  double secs = seconds_since(t0);
  bool ok = q_fits && max_top <= 1.1 * max_lo && secs <= 300.0;
  report(3, ok,
         "100 streams, Q=3^5..3^14: q<=Q " + std::string(q_fits ? "always" : "VIOLATED") +
             ", max K through 3^13 = " + num(max_lo) + ", at 3^14 = " + num(max_top) + ", " +
             num(secs) + "s");
}

void crit4_census_exactness() {
  auto t0 = Clock::now();
  const auto& buckets = census6();
  bool sizes = buckets[0].size() == 2 && buckets[1].size() == 4;

  std::set<std::string> brute;
  Int max_m = 1;
  std::size_t total = 0;
  for (const auto& bucket : buckets)
    for (const auto& rec : bucket) {
      brute.insert(rec.p.get_str() + "/" + rec.q_red.get_str());
      if (rec.m > max_m) max_m = rec.m;
      ++total;
    }
  auto divisor = divisor_census(static_cast<unsigned>(max_m.get_ui()), 6, int_pow(3, 6) - 1);
  bool equal = fraction_set(divisor) == brute;
  double secs = seconds_since(t0);
  bool ok = sizes && equal && secs <= 60.0;
  report(4, ok,
         "#S_1=" + std::to_string(buckets[0].size()) + " #S_2=" + std::to_string(buckets[1].size()) +
             ", brute(n<=6, " + std::to_string(total) + " records) " +
             (equal ? "==" : "!=") + " divisor(m<=" + max_m.get_str() + ", r<=6), " + num(secs) +
             "s");
}

void crit5_divisibility() {
  std::size_t checked = 0, holds = 0;
  for (const auto& bucket : census6())
    for (const auto& rec : bucket) {
      ++checked;
      holds += rec.q_int % rec.q_red == 0;
    }

  // random eventually periodic words; the unreduced denominator must be the
  // composed form q_pre * (q_per - p_per) and a multiple of the reduced one
  RationalIFS ifs = RationalIFS::cantor();
  std::size_t word_checked = 0, word_holds = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    auto w = random_word(31, i, ifs.alphabet_size());
    Rational v = ifs.eval(w);
    AffineMap upre = AffineMap::identity();
    for (Letter a : w.pre) upre = upre.composed_with(ifs.map(a));
    AffineMap uper = AffineMap::identity();
    for (Letter a : w.per) uper = uper.composed_with(ifs.map(a));
    Int q_int = upre.q * (uper.q - uper.p);
    ++word_checked;
    word_holds += (v.den() == q_int && v.den() % v.reduced().den() == 0);
  }
  bool ok = checked == holds && word_checked == word_holds;
  report(5, ok,
         "q_red | q_int on " + std::to_string(holds) + "/" + std::to_string(checked) +
             " census records and " + std::to_string(word_holds) + "/" +
             std::to_string(word_checked) + " random words");
}

void crit6_period_arithmetic() {
  std::size_t agree = 0;
  const std::size_t samples = 1000;
  for (std::uint64_t i = 0; i < samples; ++i) {
    std::uint64_t q = 2 + rng_below(41, 2 * i, 999998);
    std::uint64_t p = rng_below(41, 2 * i + 1, static_cast<std::uint32_t>(q + 1));
    Rational x = Rational(Int(p), Int(q)).reduced();
    auto [r, m] = period_of(3, x);
    auto [ro, mo] = observed_period(3, x.num().get_ui(), x.den().get_ui());
    agree += (r == Int(ro) && m == Int(mo));
  }
  report(6, agree == samples,
         "(r, m) from multiplicative order matches long division on " + std::to_string(agree) +
             "/" + std::to_string(samples) + " rationals with q < 1e6");
}

void crit7_probability_bound() {
  RationalIFS ifs = RationalIFS::cantor();
  auto t0 = Clock::now();
  int cells = 0, bad = 0;
  double worst = -1e300;
  for (std::size_t n : {0, 2})
    for (std::size_t m : {1, 3, 5})
      for (int l : {2, 4, 6}) {
        double ell0 = l * std::log(3.0);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
          auto rp = mc_repeat_probability(ifs, n, m, ell0, 100000, seed);
          ++cells;
          double slack = rp.se > 0 ? (rp.freq - rp.bound) / rp.se : 0.0;
          worst = std::max(worst, slack);
          if (rp.freq > rp.bound + 3 * rp.se) ++bad;
        }
      }
  double secs = seconds_since(t0);
  bool ok = bad == 0 && secs <= 600.0;
  report(7, ok,
         std::to_string(cells) + " cells at 1e5 trials: " + std::to_string(bad) +
             " exceed bound+3se, worst (freq-bound)/se = " + num(worst) + ", " + num(secs) + "s");
}

void crit8_heuristic_core() {
  auto rows = heuristic_model_sim(12, 1000000, 1);
  double worst = 0;
  for (const auto& row : rows) worst = std::max(worst, std::abs(row.z));
  bool ok = rows.size() == 12 && worst <= 4.0;
  report(8, ok,
         "block lengths 1..12 at 1e6 trials: max |z| = " + num(worst) + " against (2/3)^m");
}

void crit9_ramanujan_sweep() {
  auto t0 = Clock::now();
  FactorCache cache;
  auto rows = ramanujan_sweep(40, &cache);
  double worst = 0;
  for (const auto& row : rows) worst = std::max(worst, row.ratio);
  double secs = seconds_since(t0);
  double ceiling = std::log(2.0) + 0.2;
  bool ok = rows.size() == 39 && worst <= ceiling && secs <= 600.0;
  report(9, ok,
         std::to_string(rows.size()) + " rows m<=40, max ratio " + num(worst) + " <= " +
             num(ceiling) + ", " + num(secs) + "s");
}

void crit10_exceptions_report() {
  auto t0 = Clock::now();
  double K = 2.0 / std::log(1.5);
  std::size_t count = 0;
  auto serialize = [&] {
    std::string s;
    count = 0;
    for (int n = 1; n <= 8; ++n)
      for (const auto& rec : census_SnK(brute_census(n), K).exceptions) {
        s += record_jsonl(rec);
        s += '\n';
        ++count;
      }
    return s;
  };
  std::string first = serialize();
  std::string second = serialize();
  double secs = seconds_since(t0);
  bool ok = first == second && secs <= 1800.0;
  report(10, ok,
         "n<=8 exceptions at K=2/log(3/2): " + std::to_string(count) + " records, " +
             std::to_string(first.size()) + " bytes, recomputation " +
             (first == second ? "identical" : "DIFFERS") + ", " + num(secs) + "s");
}

void crit11_avoidance_dimension() {
  TimesDSet J = TimesDSet::cantor();
  double delta = J.dimension();
  bool ok = avoidance_dimension(J, 1) == 0.0;
  double worst_gap = 0;
  for (unsigned k = 2; k <= 6; ++k) {
    auto blk = avoidance_block_ifs(J, k, 2);
    double gap = std::abs(blk.dimension().value - avoidance_dimension(J, k));
    worst_gap = std::max(worst_gap, gap);
    ok = ok && gap <= 1e-9;
  }
  for (unsigned k = 1; k <= 20; ++k)
    ok = ok && avoidance_dimension(J, k) < avoidance_dimension(J, k + 1);
  ok = ok && avoidance_dimension(J, 21) < delta;
  report(11, ok,
         "closed form vs block IFS k<=6: max gap " + num(worst_gap) +
             ", strictly increasing toward delta=" + num(delta));
}

void crit12_translate_bounds() {
  TimesDSet J = TimesDSet::cantor();
  RationalIFS ifs = RationalIFS::cantor();
  std::size_t holds = 0;
  const std::size_t samples = 1000;
  for (std::uint64_t i = 0; i < samples; ++i) {
    auto wx = random_word(51, 3 * i, 2);
    auto wsum = random_word(51, 3 * i + 1, 2);
    auto wxy = random_word(51, 3 * i + 2, 2);
    std::size_t n = 1 + rng_below(52, i, 20);

    Rational xval = ifs.eval(wx).reduced();
    Rational p0q0 = (ifs.eval(wsum).reduced() - xval).reduced();
    auto out = translate_approximant(J, DigitStream::periodic(wx), DigitStream::periodic(wxy),
                                     p0q0, n);

    Int dn = int_pow(3, static_cast<unsigned long>(n));
    bool good = out.denom_bound == p0q0.den() * dn;
    good = good && out.error_bound == Rational(1, dn);
    good = good && out.approx.reduced().den() <= out.denom_bound;
    Rational err = ifs.eval(wxy).reduced() - xval - out.approx;
    if (err < Rational(0)) err = Rational(0) - err;
    good = good && err <= out.error_bound;
    holds += good;
  }
  report(12, holds == samples,
         "denominator and error bounds exact on " + std::to_string(holds) + "/" +
             std::to_string(samples) + " random translate triples, n <= 20");
}

void crit13_roundtrip() {
  std::vector<std::pair<RationalIFS, std::string>> systems;
  systems.emplace_back(RationalIFS::cantor(), "middle-thirds");
  systems.emplace_back(RationalIFS({AffineMap(1, 3, 0), AffineMap(1, 4, 3)}, {"0", "1"}),
                       "ratios 1/3 and 1/4");
  std::size_t holds = 0, samples = 0;
  std::uint64_t seed = 61;
  for (const auto& [ifs, tag] : systems) {
    (void)tag;
    for (std::uint64_t i = 0; i < 5000; ++i) {
      auto w = random_word(seed, i, ifs.alphabet_size()).canonical();
      auto outcome = code_rational(ifs, ifs.eval(w));
      ++samples;
      holds += (outcome.ok() && outcome.coded->word == w);
    }
    ++seed;
  }
  report(13, holds == samples,
         "code_rational(eval(w)) == canonical w on " + std::to_string(holds) + "/" +
             std::to_string(samples) + " words over two systems");
}

// every data byte equal across reruns and thread counts; manifest.json and
// *.ck.json carry timestamps and tie runs together through digests instead
bool data_trees_equal(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> rels;
  for (auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), a);
    auto name = rel.filename().string();
    if (name == "manifest.json" ||
        (name.size() > 8 && name.substr(name.size() - 8) == ".ck.json"))
      continue;
    rels.push_back(rel);
  }
  if (rels.empty()) {
    why = "no data files under " + a.string();
    return false;
  }
  for (const auto& rel : rels) {
    if (!fs::exists(b / rel)) {
      why = "missing " + rel.string();
      return false;
    }
    if (clirun::slurp(a / rel) != clirun::slurp(b / rel)) {
      why = "differs: " + rel.string();
      return false;
    }
  }
  return true;
}

void crit14_cli_determinism(const char* cli) {
  clirun::Runner runner(cli, "rifs_acceptance");
  auto ifs_path = runner.write_cantor_ifs().string();

  struct Invocation {
    std::string args;
    bool writes_files;
    bool threaded;
  };
  std::vector<Invocation> battery = {
      {"ifs --ifs " + ifs_path, false, false},
      {"code --ifs " + ifs_path + " --rational 1/4", false, false},
      {"expand --d 3 --rational 5/13", false, false},
      {"member --set d=3,E=0,2 --rational 1/13", false, false},
      {"khinchin classify --psi 1,-0.1,0 --delta 0.6309297535714574", false, false},
      {"dirichlet --ifs " + ifs_path + " --stream rational:1/13 --Q 9 --Q 6561", false, false},
      {"translate-scan --set d=3,E=0,2 --qbound 12 --depth 48 --seed 3", false, false},
      {"khinchin mc --ifs " + ifs_path + " --psi 1,0,-4.75 --trials 32 --depth 96 --seed 9",
       true, true},
      {"census brute --n 4", true, true},
      {"census divisor --max-period 4 --max-preperiod 4 --qbound 729", true, false},
      {"census diag --n-max 4 --ramanujan 8 --heuristic-m 6 --heuristic-trials 50000", true,
       true},
  };

  bool ok = true;
  std::string why;
  int runs = 0;
  for (std::size_t i = 0; i < battery.size() && ok; ++i) {
    const auto& inv = battery[i];
    std::vector<std::string> variants = {" --threads 1", " --threads 1"};
    if (inv.threaded) variants.push_back(" --threads 8");

    std::string base_out;
    std::vector<fs::path> dirs;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      std::string args = inv.args + variants[v];
      fs::path out;
      if (inv.writes_files) {
        out = runner.fresh_dir("b" + std::to_string(i) + "_v" + std::to_string(v));
        args += " --out " + out.string();
        if (inv.args.rfind("khinchin mc", 0) == 0) args += " --csv " + (out / "mc.csv").string();
      }
      auto res = runner.run(args);
      ++runs;
      if (res.exit_code != 0) {
        ok = false;
        why = "exit " + std::to_string(res.exit_code) + " for: " + args;
        break;
      }
      if (v == 0) {
        base_out = res.out;
        if (inv.writes_files) dirs.push_back(out);
        continue;
      }
      if (res.out != base_out) {
        ok = false;
        why = "stdout differs for: " + args;
        break;
      }
      if (inv.writes_files && !data_trees_equal(dirs[0], out, why)) {
        ok = false;
        why += " for: " + inv.args;
        break;
      }
    }
  }
  report(14, ok,
         ok ? std::to_string(runs) + " invocations across reruns and threads 1/8: stdout and "
                                     "data files byte-identical"
            : why);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli-binary>\n";
    return 2;
  }
  auto run = [](int id, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  run(1, crit1_intrinsic_denominator);
  run(2, crit2_dimension);
  run(3, crit3_dirichlet_grid);
  run(4, crit4_census_exactness);
  run(5, crit5_divisibility);
  run(6, crit6_period_arithmetic);
  run(7, crit7_probability_bound);
  run(8, crit8_heuristic_core);
  run(9, crit9_ramanujan_sweep);
  run(10, crit10_exceptions_report);
  run(11, crit11_avoidance_dimension);
  run(12, crit12_translate_bounds);
  run(13, crit13_roundtrip);
  run(14, [&] { crit14_cli_determinism(argv[1]); });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
