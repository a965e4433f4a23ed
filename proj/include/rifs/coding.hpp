#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/ifs.hpp"
#include "rifs/word.hpp"

namespace rifs {

struct CodedRational {
  EventuallyPeriodicWord word;  // canonical form
  Rational unreduced;           // denominator q_(1)*(q_(2)-p_(2)) of the canonical word
  Rational reduced;
  Int q_int;  // intrinsic denominator (the unreduced one)
  Int q_red;
};

enum class CodingStatus { ok, not_in_limit_set, periodicity_undetected };

struct CodingOutcome {
  CodingStatus status = CodingStatus::not_in_limit_set;
  std::optional<CodedRational> coded;
  FiniteWord partial;  // letters established before the orbit left the limit set

  bool ok() const { return status == CodingStatus::ok; }
};

inline const char* coding_status_name(CodingStatus s) {
  switch (s) {
    case CodingStatus::ok: return "ok";
    case CodingStatus::not_in_limit_set: return "NotInLimitSet";
    case CodingStatus::periodicity_undetected: return "PeriodicityUndetected";
  }
  return "?";
}

// sum of log q over the letters of w
inline double pseudolength(const RationalIFS& ifs, const FiniteWord& w) {
  double s = 0;
  for (Letter a : w) s += ifs.log_q(a);
  return s;
}

inline Int intrinsic_denominator(const RationalIFS& ifs, const EventuallyPeriodicWord& w) {
  return ifs.eval(w.canonical()).den();
}

/*
 * Digit coding of a rational by inverse-branch iteration.  Strong separation
 * makes the branch at each orbit point unique, so the word is the word of x,
 * not an artifact of tie-breaking.  Orbit states are kept reduced and hashed;
 * the first revisited state closes the cycle, and because each state is the
 * value of the tail word, the (preperiod, period) read off the cycle is
 * already the canonical minimal pair.  Eventual periodicity of the orbit is
 * guaranteed when every |p_a| = 1 (inverse branches keep the denominator of
 * x); for wilder slopes the step budget may run out instead.
 */
inline CodingOutcome code_rational(const RationalIFS& ifs, const Rational& x,
                                   long max_steps = -1) {
  if (!ifs.strong_separation())
    throw err_not_separated("code_rational requires a strongly separated IFS");
  Rational state = x.reduced();
  if (max_steps < 0) {
    Int budget = 10 * state.den() + 1000;
    max_steps = budget.fits_slong_p() ? budget.get_si() : 1000000L;
  }

  std::vector<Interval> images;
  for (Letter a = 0; a < ifs.alphabet_size(); ++a) images.push_back(ifs.image_of_hull(a));

  CodingOutcome out;
  if (!ifs.hull().contains(state)) return out;

  std::unordered_map<std::string, std::size_t> seen;
  std::vector<Rational> states;
  FiniteWord letters;

  for (long step = 0; step <= max_steps; ++step) {
    auto it = seen.find(state.key());
    if (it != seen.end()) {
      std::size_t cycle_start = it->second;
      FiniteWord pre(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(cycle_start));
      FiniteWord per(letters.begin() + static_cast<std::ptrdiff_t>(cycle_start), letters.end());
      EventuallyPeriodicWord word = EventuallyPeriodicWord(pre, per).canonical();
      Rational unreduced = ifs.eval(word);
      CodedRational coded{word, unreduced, unreduced.reduced(), unreduced.den(),
                          unreduced.reduced().den()};
      out.status = CodingStatus::ok;
      out.coded = std::move(coded);
      out.partial = letters;
      return out;
    }
    seen.emplace(state.key(), states.size());
    states.push_back(state);

    std::optional<Letter> branch;
    for (Letter a = 0; a < ifs.alphabet_size(); ++a) {
      if (images[a].contains(state)) {
        branch = a;
        break;
      }
    }
    if (!branch) {
      out.status = CodingStatus::not_in_limit_set;
      out.partial = letters;
      return out;
    }
    letters.push_back(*branch);
    state = ifs.map(*branch).inverse_apply(state).reduced();
  }
  out.status = CodingStatus::periodicity_undetected;
  out.partial = letters;
  return out;
}

}  // namespace rifs
