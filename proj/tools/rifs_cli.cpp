// rifs: one binary exposing the library as subcommands.  Every run emits a
// manifest (to --out/manifest.json, else stderr); all file and stdout output
// is deterministic for a fixed (argv, seed), independent of --threads.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rifs/census.hpp"
#include "rifs/coding.hpp"
#include "rifs/dirichlet.hpp"
#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/ifs.hpp"
#include "rifs/khinchin.hpp"
#include "rifs/manifest.hpp"
#include "rifs/stream.hpp"
#include "rifs/times_d.hpp"

namespace {

using namespace rifs;

// full-fidelity, locale-independent double rendering
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

Int parse_int(const std::string& text) {
  try {
    return Int(text, 10);
  } catch (const std::exception&) {
    throw err_invalid_argument("cannot parse integer '" + text + "'");
  }
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  Int num = parse_int(text.substr(0, slash));
  Int den = slash == std::string::npos ? Int(1) : parse_int(text.substr(slash + 1));
  if (den == 0) throw err_invalid_argument("zero denominator in '" + text + "'");
  return Rational(num, den);
}

PsiFamily parse_psi(const std::string& text) {
  std::istringstream in(text);
  double v[3];
  char sep = ',';
  for (int i = 0; i < 3; ++i) {
    if (i && !(in >> sep && sep == ',')) sep = 0;
    if (sep != ',' || !(in >> v[i]))
      throw err_invalid_argument("psi spec must be 'A,a,b', got '" + text + "'");
  }
  return PsiFamily(v[0], v[1], v[2]);
}

RationalIFS load_ifs(const std::string& path, RunManifest& mani) {
  std::ifstream in(path);
  if (!in) throw err_bad_file("cannot open IFS file " + path);
  RationalIFS ifs = RationalIFS::parse(in);
  mani.add_input("ifs", path);
  return ifs;
}

// SPEC: periodic:PRE:PER | rational:P/Q | random[:SEED]
DigitStream parse_stream(const std::string& spec, const RationalIFS& ifs,
                         std::uint64_t default_seed) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "periodic") {
    auto second = rest.find(':');
    if (second == std::string::npos)
      throw err_invalid_argument("periodic stream needs 'periodic:PRE:PER'");
    FiniteWord pre = ifs.parse_letters(rest.substr(0, second));
    FiniteWord per = ifs.parse_letters(rest.substr(second + 1));
    return DigitStream::periodic(EventuallyPeriodicWord(pre, per));
  }
  if (kind == "rational") {
    auto outcome = code_rational(ifs, parse_rational(rest));
    if (!outcome.ok())
      throw Error(outcome.status == CodingStatus::not_in_limit_set ? "NotInLimitSet"
                                                                   : "PeriodicityUndetected",
                  "stream rational is not a coded point of the limit set (partial word '" +
                      ifs.render(outcome.partial) + "')");
    return DigitStream::periodic(outcome.coded->word);
  }
  if (kind == "random") {
    std::uint64_t seed = rest.empty() ? default_seed : parse_int(rest).get_ui();
    return DigitStream::random(seed, static_cast<std::uint32_t>(ifs.alphabet_size()));
  }
  throw err_invalid_argument("unknown stream kind '" + kind + "'");
}

struct Ctx {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: pick at runtime
  std::string out;
  RunManifest mani;

  unsigned worker_threads() const {
    if (threads) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
  }

  // open an output file under --out, tracked in the manifest
  std::ofstream open_out(const std::string& name) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw err_bad_file("cannot write " + name + " under " + out);
    return f;
  }
};

void cmd_ifs_info(Ctx& ctx, const std::string& ifs_path) {
  RationalIFS ifs = load_ifs(ifs_path, ctx.mani);
  auto dim = ifs.dimension();
  std::cout << "maps: " << ifs.alphabet_size() << "\n"
            << "hull: [" << ifs.hull().lo.reduced().str() << ", " << ifs.hull().hi.reduced().str()
            << "]\n"
            << "dimension: " << fmt(dim.value) << "\n"
            << "dimension_error: " << fmt(dim.error) << "\n"
            << "gamma: " << fmt(ifs.gamma()) << "\n"
            << "strong_separation: " << (ifs.strong_separation() ? "true" : "false") << "\n"
            << "open_set_condition: " << (ifs.open_set_condition() ? "true" : "false") << "\n"
            << "q_max: " << ifs.q_max().get_str() << "\n";
}

void cmd_dirichlet(Ctx& ctx, const std::string& ifs_path, const std::string& stream_spec,
                   const std::vector<std::string>& budgets_text, std::size_t lookahead,
                   const std::string& csv_path) {
  RationalIFS ifs = load_ifs(ifs_path, ctx.mani);
  DigitStream stream = parse_stream(stream_spec, ifs, ctx.seed);
  std::vector<Int> budgets;
  for (const auto& t : budgets_text) budgets.push_back(parse_int(t));

  auto rows = dirichlet_scan(ifs, stream, budgets, lookahead);
  if (rows.size() == 1) {
    ApproximationResult r = dirichlet_approximate(ifs, stream, budgets[0], lookahead);
    std::cout << "word: " << ifs.render(r.word) << "\n"
              << "value: " << r.reduced.str() << "\n"
              << "q_unreduced: " << r.q_unreduced.get_str() << "\n"
              << "q_reduced: " << r.reduced.den().get_str() << "\n"
              << "n: " << r.n << "\nm: " << r.m << "\n"
              << "error_upper: " << fmt(r.error_enclosure.hi.to_double()) << "\n"
              << "error_exact: " << (r.error_exact ? "true" : "false") << "\n"
              << "orbit_budget: " << r.orbit_budget << "\n"
              << "lookahead_used: " << r.lookahead_used << "\n";
  }
  for (const auto& row : rows)
    std::cout << "Q=" << row.Q.get_str() << " q=" << row.q_unreduced.get_str() << " n=" << row.n
              << " m=" << row.m << " err<=" << fmt(row.error_ub) << " K_q=" << fmt(row.K_by_q)
              << " K_Q=" << fmt(row.K_by_Q) << "\n";

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw err_bad_file("cannot write " + csv_path);
    csv << "Q,q_unreduced,n,m,error_upper,K_by_q,K_by_Q\n";
    for (const auto& row : rows)
      csv << row.Q.get_str() << "," << row.q_unreduced.get_str() << "," << row.n << "," << row.m
          << "," << fmt(row.error_ub) << "," << fmt(row.K_by_q) << "," << fmt(row.K_by_Q) << "\n";
    csv.close();
    ctx.mani.add_output("", csv_path);
  }
}

void cmd_code(Ctx& ctx, const std::string& ifs_path, const std::string& rational_text,
              std::size_t max_steps) {
  RationalIFS ifs = load_ifs(ifs_path, ctx.mani);
  Rational x = parse_rational(rational_text);
  auto outcome = code_rational(ifs, x, max_steps);
  std::cout << "status: " << coding_status_name(outcome.status) << "\n";
  if (outcome.ok()) {
    const auto& c = *outcome.coded;
    std::cout << "word: " << ifs.render(c.word) << "\n"
              << "value: " << c.reduced.str() << "\n"
              << "q_int: " << c.q_int.get_str() << "\n"
              << "q_red: " << c.q_red.get_str() << "\n"
              << "q_red_divides_q_int: " << (c.q_int % c.q_red == 0 ? "true" : "false") << "\n";
  } else {
    std::cout << "partial: " << ifs.render(outcome.partial) << "\n";
  }
}

void cmd_expand(unsigned d, const std::string& rational_text) {
  Rational x = parse_rational(rational_text);
  ExpansionPair pair = expand_rational(d, x);
  auto show = [&](const char* label, const BaseDExpansion& e) {
    std::cout << label << ": r=" << e.r.get_str() << " m=" << e.m() << " pre=\"";
    for (std::size_t i = 0; i < e.pre.size(); ++i) {
      if (i) std::cout << " ";
      std::cout << e.pre[i];
    }
    std::cout << "\" per=\"";
    for (std::size_t i = 0; i < e.per.size(); ++i) {
      if (i) std::cout << " ";
      std::cout << e.per[i];
    }
    std::cout << "\" terminating=" << (e.terminating ? "true" : "false") << "\n";
  };
  show("primary", pair.primary);
  if (pair.dual) show("dual", *pair.dual);
  auto [r, m] = period_of(d, x);
  std::cout << "period_of: r=" << r.get_str() << " m=" << m.get_str() << "\n";
}

void cmd_member(const std::string& set_spec, const std::string& rational_text) {
  TimesDSet J = TimesDSet::parse(set_spec);
  Rational x = parse_rational(rational_text);
  MemberResult res = member(J, x);
  std::cout << "set: " << J.spec_string() << "\n"
            << "member: " << (res.member ? "true" : "false") << "\n";
  if (res.member) {
    const auto& e = *res.certificate;
    std::cout << "certificate: r=" << e.r.get_str() << " m=" << e.m() << " pre=\"";
    for (std::size_t i = 0; i < e.pre.size(); ++i) std::cout << (i ? " " : "") << e.pre[i];
    std::cout << "\" per=\"";
    for (std::size_t i = 0; i < e.per.size(); ++i) std::cout << (i ? " " : "") << e.per[i];
    std::cout << "\"\n";
  } else {
    std::cout << "refusal_position: " << res.refusal->first.get_str() << "\n"
              << "refusal_digit: " << res.refusal->second << "\n";
  }
}

void cmd_translate_scan(Ctx& ctx, const std::string& set_spec, const std::string& qbound_text,
                        std::size_t depth, const std::string& csv_path) {
  TimesDSet J = TimesDSet::parse(set_spec);
  DigitStream x = DigitStream::random(ctx.seed, static_cast<std::uint32_t>(J.digits.size()));
  auto rows = scan_translate_rationals(J, x, parse_int(qbound_text), depth);
  std::size_t confirmed = 0, undetermined = 0;
  for (const auto& row : rows) {
    confirmed += row.confirmed;
    undetermined += row.undetermined;
  }
  std::cout << "set: " << J.spec_string() << "\nseed: " << ctx.seed << "\ndepth: " << depth
            << "\ncandidates: " << rows.size() << "\nconfirmed: " << confirmed
            << "\nundetermined: " << undetermined << "\n";
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw err_bad_file("cannot write " + csv_path);
    csv << "p,q,confirmed,undetermined\n";
    for (const auto& row : rows)
      csv << row.value.num().get_str() << "," << row.value.den().get_str() << ","
          << (row.confirmed ? 1 : 0) << "," << (row.undetermined ? 1 : 0) << "\n";
    csv.close();
    ctx.mani.add_output("", csv_path);
  }
}

void cmd_khinchin_classify(const std::string& psi_text, double delta, double q_limit) {
  PsiFamily psi = parse_psi(psi_text);
  SeriesReport badly = classify_series_badly(psi, delta, q_limit);
  std::cout << "badly_series: " << series_verdict_name(badly.verdict)
            << (badly.verdict == SeriesVerdict::converges ? " (badly approximable setup holds)"
                                                          : "")
            << "\n"
            << "badly_partial_sum: " << fmt(badly.total) << " (skipped " << badly.skipped
            << " near-zero terms)\n";
  SeriesReport well = classify_series_well(psi, delta, q_limit);
  std::cout << "well_series: " << series_verdict_name(well.verdict) << "\n"
            << "well_partial_sum: " << fmt(well.total) << " (skipped " << well.skipped
            << " near-zero terms)\n";
}

void cmd_khinchin_mc(Ctx& ctx, const std::string& ifs_path, const std::string& psi_text,
                     std::uint64_t trials, std::size_t depth, const std::string& csv_path) {
  RationalIFS ifs = load_ifs(ifs_path, ctx.mani);
  PsiFamily psi = parse_psi(psi_text);
  McSummary summary = mc_khinchin_experiment(ifs, psi, trials, depth, ctx.seed, 0.0,
                                             ctx.worker_threads());
  std::cout << "trials: " << trials << "\ndepth: " << depth << "\nseed: " << ctx.seed << "\n"
            << "max_excess_min: " << fmt(summary.excess.min) << "\n"
            << "max_excess_q25: " << fmt(summary.excess.q25) << "\n"
            << "max_excess_median: " << fmt(summary.excess.median) << "\n"
            << "max_excess_q75: " << fmt(summary.excess.q75) << "\n"
            << "max_excess_max: " << fmt(summary.excess.max) << "\n"
            << "max_excess_mean: " << fmt(summary.excess.mean) << "\n";
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw err_bad_file("cannot write " + csv_path);
    csv << "trial,max_excess,violations,repeats\n";
    for (const auto& row : summary.rows)
      csv << row.trial << "," << fmt(row.max_excess) << "," << row.violations << ","
          << row.repeats << "\n";
    csv.close();
    ctx.mani.add_output("", csv_path);
  }
}

constexpr double kConjectureK = 4.9326699200923635;  // 2 / log(3/2)

void write_bucket_summary(Ctx& ctx, const std::string& name,
                          const std::vector<std::vector<CensusRecord>>& per_bucket) {
  auto rows = conjecture_diagnostics(per_bucket, kConjectureK);
  auto csv = ctx.open_out(name);
  csv << "n,count_total,count_interior,growth,max_ratio,argmax_p,argmax_q,exceptions\n";
  for (const auto& row : rows)
    csv << row.n << "," << row.count_total << "," << row.count_interior << "," << fmt(row.growth)
        << "," << fmt(row.max_ratio) << "," << row.argmax_p.get_str() << ","
        << row.argmax_q.get_str() << "," << row.exceptions << "\n";
  csv.close();
  ctx.mani.add_output(ctx.out, name);
}

void cmd_census_brute(Ctx& ctx, int n, const std::string& resume_dir) {
  if (ctx.out.empty()) {
    auto records = brute_census(n, ctx.worker_threads());
    std::cout << "n: " << n << "\nrecords: " << records.size() << "\n";
    return;
  }
  std::string workdir = resume_dir.empty() ? ctx.out : resume_dir;
  PersistentCensus result = brute_census_persistent(n, workdir, ctx.worker_threads());

  std::string merged = "census_n" + std::to_string(n) + ".jsonl";
  {
    auto out = ctx.open_out(merged);
    for (const auto& line : result.lines) out << line << "\n";
  }
  ctx.mani.add_output(ctx.out, merged);
  for (const auto& shard : result.shard_files) ctx.mani.add_output(workdir, shard);

  std::vector<CensusRecord> records;
  for (const auto& line : result.lines) {
    auto j = nlohmann::json::parse(line);
    CensusRecord rec;
    rec.p = Int(j["p"].get<std::string>(), 10);
    rec.q_red = Int(j["q"].get<std::string>(), 10);
    rec.n_bucket = j["n"].get<int>();
    rec.r = j["r"].get<long>();
    rec.m = j["m"].get<long>();
    rec.ratio = j["ratio"].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : j["ratio"].get<double>();
    records.push_back(rec);
  }
  write_bucket_summary(ctx, "summary.csv", {std::move(records)});
  std::cout << "n: " << n << "\nrecords: " << result.lines.size()
            << "\nshards_reused: " << result.shards_reused
            << "\nshards_computed: " << result.shards_computed << "\n";
}

void cmd_census_divisor(Ctx& ctx, unsigned max_period, unsigned max_preperiod,
                        const std::string& qbound_text) {
  auto records = divisor_census(max_period, max_preperiod, parse_int(qbound_text));
  std::cout << "records: " << records.size() << "\n";
  if (ctx.out.empty()) return;
  {
    auto out = ctx.open_out("divisor.jsonl");
    for (const auto& rec : records) out << record_jsonl(rec) << "\n";
  }
  ctx.mani.add_output(ctx.out, "divisor.jsonl");

  int n_max = 0;
  for (const auto& rec : records) n_max = std::max(n_max, rec.n_bucket);
  std::vector<std::vector<CensusRecord>> per_bucket(static_cast<std::size_t>(n_max));
  for (auto& rec : records) per_bucket[static_cast<std::size_t>(rec.n_bucket - 1)].push_back(rec);
  write_bucket_summary(ctx, "summary.csv", per_bucket);
}

void cmd_census_diag(Ctx& ctx, int n_max, unsigned ramanujan_m, unsigned heuristic_m,
                     std::uint64_t heuristic_trials) {
  std::vector<std::vector<CensusRecord>> per_bucket;
  for (int n = 1; n <= n_max; ++n) per_bucket.push_back(brute_census(n, ctx.worker_threads()));

  auto rows = conjecture_diagnostics(per_bucket, kConjectureK);
  for (const auto& row : rows)
    std::cout << "n=" << row.n << " total=" << row.count_total
              << " interior=" << row.count_interior << " growth=" << fmt(row.growth)
              << " max_ratio=" << fmt(row.max_ratio) << " exceptions=" << row.exceptions << "\n";

  if (ctx.out.empty()) return;
  write_bucket_summary(ctx, "diag.csv", per_bucket);
  {
    auto out = ctx.open_out("exceptions.jsonl");
    for (const auto& bucket : per_bucket)
      for (const auto& rec : census_SnK(bucket, kConjectureK).exceptions)
        out << record_jsonl(rec) << "\n";
  }
  ctx.mani.add_output(ctx.out, "exceptions.jsonl");

  if (ramanujan_m >= 2) {
    FactorCache cache;
    auto sweep = ramanujan_sweep(ramanujan_m, &cache);
    auto out = ctx.open_out("ramanujan.csv");
    out << "m,N,tau,ratio\n";
    for (const auto& row : sweep)
      out << row.m << "," << row.N.get_str() << "," << row.tau.get_str() << "," << fmt(row.ratio)
          << "\n";
    out.close();
    ctx.mani.add_output(ctx.out, "ramanujan.csv");
  }
  if (heuristic_m >= 1 && heuristic_trials >= 1) {
    auto sim = heuristic_model_sim(heuristic_m, heuristic_trials, ctx.seed, ctx.worker_threads());
    auto out = ctx.open_out("heuristic.csv");
    out << "m,trials,hits,freq,expected,se,z\n";
    for (const auto& row : sim)
      out << row.m << "," << row.trials << "," << row.hits << "," << fmt(row.freq) << ","
          << fmt(row.expected) << "," << fmt(row.se) << "," << fmt(row.z) << "\n";
    out.close();
    ctx.mani.add_output(ctx.out, "heuristic.csv");
  }
}

}  // namespace

int main(int argc, char** argv) {
  Ctx ctx;
  ctx.mani.args.assign(argv + 1, argv + argc);
  ctx.mani.started_at = utc_timestamp();

  CLI::App app{"intrinsic approximation toolkit for rational IFS fractals"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", ctx.seed, "base PRNG seed (decimal)");
  app.add_option("--threads", ctx.threads, "worker threads (0: all available)");
  app.add_option("--out", ctx.out, "output directory for files and manifest.json");

  std::string ifs_path, stream_spec, rational_text, set_spec, psi_text, csv_path;
  std::string qbound_text = "1", resume_dir;
  std::vector<std::string> budgets;
  std::size_t lookahead = 32, depth = 32, max_steps = 1u << 20;
  unsigned d = 3, max_period = 1, max_preperiod = 0;
  unsigned ramanujan_m = 0, heuristic_m = 0;
  std::uint64_t trials = 1000, heuristic_trials = 100000;
  double delta = 0, q_limit = 1e6;
  int n_bucket = 1, n_max = 4;

  auto* c_info = app.add_subcommand("ifs", "IFS facts: hull, dimension, gamma, separation");
  c_info->add_option("--ifs", ifs_path, "IFS file")->required();
  c_info->callback([&] { cmd_ifs_info(ctx, ifs_path); });

  auto* c_dir = app.add_subcommand("dirichlet", "pigeonhole intrinsic approximation");
  c_dir->add_option("--ifs", ifs_path, "IFS file")->required();
  c_dir->add_option("--stream", stream_spec, "periodic:PRE:PER | rational:P/Q | random[:SEED]")
      ->required();
  c_dir->add_option("--Q", budgets, "denominator budget(s), decimal")->required();
  c_dir->add_option("--lookahead", lookahead, "initial enclosure depth");
  c_dir->add_option("--csv", csv_path, "write scan rows as CSV");
  c_dir->callback([&] { cmd_dirichlet(ctx, ifs_path, stream_spec, budgets, lookahead, csv_path); });

  auto* c_code = app.add_subcommand("code", "symbolic coding of a rational point");
  c_code->add_option("--ifs", ifs_path, "IFS file")->required();
  c_code->add_option("--rational", rational_text, "point P/Q")->required();
  c_code->add_option("--max-steps", max_steps, "orbit step budget");
  c_code->callback([&] { cmd_code(ctx, ifs_path, rational_text, max_steps); });

  auto* c_exp = app.add_subcommand("expand", "base-d expansion with preperiod and period");
  c_exp->add_option("--d", d, "base")->required();
  c_exp->add_option("--rational", rational_text, "value P/Q in [0,1]")->required();
  c_exp->callback([&] { cmd_expand(d, rational_text); });

  auto* c_mem = app.add_subcommand("member", "digit-restricted set membership");
  c_mem->add_option("--set", set_spec, "set spec, e.g. d=3,E=0,2")->required();
  c_mem->add_option("--rational", rational_text, "point P/Q")->required();
  c_mem->callback([&] { cmd_member(set_spec, rational_text); });

  auto* c_tr = app.add_subcommand("translate-scan", "rational translates staying in the set");
  c_tr->add_option("--set", set_spec, "set spec, e.g. d=3,E=0,2")->required();
  c_tr->add_option("--qbound", qbound_text, "max denominator")->required();
  c_tr->add_option("--depth", depth, "digits checked per candidate");
  c_tr->add_option("--csv", csv_path, "write candidate rows as CSV");
  c_tr->callback([&] { cmd_translate_scan(ctx, set_spec, qbound_text, depth, csv_path); });

  auto* c_kh = app.add_subcommand("khinchin", "zero-full series tests and repeat experiments");
  c_kh->require_subcommand(1);
  auto* c_cls = c_kh->add_subcommand("classify", "convergence verdicts for a psi family");
  c_cls->add_option("--psi", psi_text, "psi parameters A,a,b")->required();
  c_cls->add_option("--delta", delta, "dimension exponent in (0,1]")->required();
  c_cls->add_option("--q-limit", q_limit, "partial sum horizon");
  c_cls->callback([&] { cmd_khinchin_classify(psi_text, delta, q_limit); });
  auto* c_mc = c_kh->add_subcommand("mc", "Monte Carlo repeat-length scan");
  c_mc->add_option("--ifs", ifs_path, "IFS file")->required();
  c_mc->add_option("--psi", psi_text, "psi parameters A,a,b")->required();
  c_mc->add_option("--trials", trials, "sample paths");
  c_mc->add_option("--depth", depth, "letters per path");
  c_mc->add_option("--csv", csv_path, "write per-trial rows as CSV");
  c_mc->callback([&] { cmd_khinchin_mc(ctx, ifs_path, psi_text, trials, depth, csv_path); });

  auto* c_cen = app.add_subcommand("census", "rationals of the middle-thirds set");
  c_cen->require_subcommand(1);
  auto* c_br = c_cen->add_subcommand("brute", "exhaustive denominator bucket scan");
  c_br->add_option("--n", n_bucket, "bucket: 3^(n-1) <= q < 3^n")->required();
  c_br->add_option("--resume", resume_dir, "shard directory to reuse (default: --out)");
  c_br->callback([&] { cmd_census_brute(ctx, n_bucket, resume_dir); });
  auto* c_dv = c_cen->add_subcommand("divisor", "period/preperiod block construction");
  c_dv->add_option("--max-period", max_period, "largest period m")->required();
  c_dv->add_option("--max-preperiod", max_preperiod, "largest preperiod r")->required();
  c_dv->add_option("--qbound", qbound_text, "cap on reduced denominators")->required();
  c_dv->callback([&] { cmd_census_divisor(ctx, max_period, max_preperiod, qbound_text); });
  auto* c_dg = c_cen->add_subcommand("diag", "growth and period-ratio diagnostics");
  c_dg->add_option("--n-max", n_max, "largest bucket")->required();
  c_dg->add_option("--ramanujan", ramanujan_m, "also sweep divisor ratios up to this m");
  c_dg->add_option("--heuristic-m", heuristic_m, "also simulate digit blocks up to this m");
  c_dg->add_option("--heuristic-trials", heuristic_trials, "trials per block length");
  c_dg->callback(
      [&] { cmd_census_diag(ctx, n_max, ramanujan_m, heuristic_m, heuristic_trials); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text on stdout, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    nlohmann::json j{{"error", e.code()}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "Internal"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }

  ctx.mani.seed = ctx.seed;
  ctx.mani.threads = ctx.worker_threads();
  for (const auto* sub : app.get_subcommands()) {
    ctx.mani.command = sub->get_name();
    for (const auto* nested : sub->get_subcommands())
      ctx.mani.command += " " + nested->get_name();
  }
  ctx.mani.finished_at = utc_timestamp();
  if (ctx.out.empty()) {
    std::cerr << ctx.mani.to_json().dump() << "\n";
  } else {
    std::filesystem::create_directories(ctx.out);
    ctx.mani.write_file((std::filesystem::path(ctx.out) / "manifest.json").string());
  }
  return 0;
}
