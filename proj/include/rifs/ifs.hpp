#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rifs/errors.hpp"
#include "rifs/exact.hpp"
#include "rifs/word.hpp"

namespace rifs {

/*
 * One affine branch u(t) = (p t + r)/q with integer p, r and positive integer
 * q.  A branch built from user input must be a contraction: 0 < |p| < q.
 * Compositions are represented by the same coefficient triple; the triple of
 * a composed word is kept unreduced, which is what makes the composed
 * denominator q_(1)*(q_(2)-p_(2)) of an eventually periodic evaluation a
 * well-defined integer rather than an accident of gcd cancellation.
 */
struct AffineMap {
  Int p, q, r;

  AffineMap(Int pp, Int qq, Int rr) : p(std::move(pp)), q(std::move(qq)), r(std::move(rr)) {
    if (q <= 0) throw err_not_contracting("map denominator must be positive, got q=" + q.get_str());
    if (p == 0 || abs(p) >= q)
      throw err_not_contracting("map must satisfy 0 < |p| < q, got p=" + p.get_str() +
                                " q=" + q.get_str());
  }

  static AffineMap identity() { return AffineMap(unchecked{}, 1, 1, 0); }

  // this(inner(t)); coefficients multiply without reduction
  AffineMap composed_with(const AffineMap& inner) const {
    return AffineMap(unchecked{}, p * inner.p, q * inner.q, p * inner.r + r * inner.q);
  }

  Rational apply(const Rational& x) const { return Rational(p * x.num() + r * x.den(), q * x.den()); }

  Interval apply(const Interval& iv) const {
    Rational a = apply(iv.lo), b = apply(iv.hi);
    return p > 0 ? Interval(a, b) : Interval(b, a);
  }

  // exact inverse branch: u^{-1}(x) = (q x - r)/p
  Rational inverse_apply(const Rational& x) const {
    return Rational(q * x.num() - r * x.den(), p * x.den());
  }

  Rational contraction() const { return Rational(abs(p), q); }

  // q - p > 0 whenever |p| < q, so the fixed point r/(q - p) always exists
  Rational fixed_point() const { return Rational(r, q - p); }

  friend bool operator==(const AffineMap& a, const AffineMap& b) {
    return a.p == b.p && a.q == b.q && a.r == b.r;
  }

 private:
  struct unchecked {};
  AffineMap(unchecked, Int pp, Int qq, Int rr)
      : p(std::move(pp)), q(std::move(qq)), r(std::move(rr)) {}
};

struct DimensionResult {
  double value;
  double error;  // half-width of the final bisection bracket
  int iterations;
};

class RationalIFS {
 public:
  explicit RationalIFS(std::vector<AffineMap> maps, std::vector<std::string> display = {})
      : maps_(std::move(maps)), display_(std::move(display)) {
    if (maps_.empty()) throw err_invalid_argument("IFS needs at least one map");
    if (maps_.size() > 255) throw err_invalid_argument("alphabet larger than 255 letters");
    if (display_.empty()) {
      for (std::size_t i = 0; i < maps_.size(); ++i) display_.push_back(std::to_string(i));
    }
    if (display_.size() != maps_.size())
      throw err_bad_file("letters header count does not match map count");
    hull_ = compute_hull();
  }

  static RationalIFS cantor() {
    return RationalIFS({AffineMap(1, 3, 0), AffineMap(1, 3, 2)}, {"0", "2"});
  }

  std::size_t alphabet_size() const { return maps_.size(); }

  const AffineMap& map(Letter a) const {
    if (a >= maps_.size())
      throw err_invalid_letter("letter index " + std::to_string(int(a)) + " out of range");
    return maps_[a];
  }

  const std::vector<AffineMap>& maps() const { return maps_; }
  const std::string& display(Letter a) const { return display_.at(a); }

  std::optional<Letter> letter_of_display(const std::string& digit) const {
    for (std::size_t i = 0; i < display_.size(); ++i)
      if (display_[i] == digit) return Letter(i);
    return std::nullopt;
  }

  bool single_char_display() const {
    for (const auto& s : display_)
      if (s.size() != 1) return false;
    return true;
  }

  std::string render(const FiniteWord& w) const {
    std::string out;
    bool tight = single_char_display();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!tight && i) out += ' ';
      out += display(w[i]);
    }
    return out;
  }

  std::string render(const EventuallyPeriodicWord& w) const {
    return render(w.pre) + "(" + render(w.per) + ")^inf";
  }

  FiniteWord parse_letters(const std::string& text) const {
    FiniteWord out;
    if (single_char_display()) {
      for (char c : text) {
        if (c == ' ' || c == '\t') continue;
        auto l = letter_of_display(std::string(1, c));
        if (!l) throw err_invalid_letter("unknown digit '" + std::string(1, c) + "'");
        out.push_back(*l);
      }
    } else {
      std::istringstream in(text);
      std::string tok;
      while (in >> tok) {
        auto l = letter_of_display(tok);
        if (!l) throw err_invalid_letter("unknown digit '" + tok + "'");
        out.push_back(*l);
      }
    }
    return out;
  }

  Int q_max() const {
    Int m = maps_[0].q;
    for (const auto& u : maps_) m = std::max(m, u.q);
    return m;
  }

  double log_q(Letter a) const { return log_big(map(a).q); }

  double min_log_q() const {
    double m = log_big(maps_[0].q);
    for (const auto& u : maps_) m = std::min(m, log_big(u.q));
    return m;
  }

  double max_log_q() const {
    double m = log_big(maps_[0].q);
    for (const auto& u : maps_) m = std::max(m, log_big(u.q));
    return m;
  }

  // growth exponent max_a log|p_a| / log q_a; zero exactly when every |p_a| = 1
  double gamma() const {
    double g = 0;
    for (const auto& u : maps_) g = std::max(g, log_big(abs(u.p)) / log_big(u.q));
    return g;
  }

  /*
   * Convex hull [c, d] of the attractor.  The endpoints satisfy the
   * active-constraint system c = min_a inf u_a([c,d]), d = max_a sup u_a([c,d]);
   * each choice of active map for c and for d yields a 2x2 linear system over
   * the rationals.  We enumerate all candidate assignments, solve exactly, and
   * keep the solution that is invariant and attained; monotone contraction of
   * the endpoint map makes it unique.
   */
  const Interval& hull() const { return hull_; }

  Interval image_of_hull(Letter a) const { return map(a).apply(hull()); }

  bool strong_separation() const { return separation_gap(true); }
  bool open_set_condition() const { return separation_gap(false); }

  DimensionResult dimension(double tol = 1e-12, int max_iter = 200) const {
    if (!(tol > 0)) throw err_invalid_tolerance("tolerance must be positive");
    if (maps_.size() < 2)
      throw err_invalid_argument("similarity dimension needs an alphabet of size >= 2");
    std::vector<double> logs;
    for (const auto& u : maps_) logs.push_back(u.contraction().log());
    auto f = [&](double s) {
      double sum = 0;
      for (double lg : logs) sum += std::exp(s * lg);
      return sum - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    int iters = 0;
    while (f(hi) > 0) {
      hi *= 2;
      if (++iters > 64) throw err_invalid_argument("contraction ratios do not admit a dimension");
    }
    while (hi - lo > tol && iters < max_iter) {
      double mid = 0.5 * (lo + hi);
      (f(mid) > 0 ? lo : hi) = mid;
      ++iters;
    }
    return DimensionResult{0.5 * (lo + hi), 0.5 * (hi - lo), iters};
  }

  AffineMap compose_word(const FiniteWord& w) const {
    AffineMap u = AffineMap::identity();
    for (Letter a : w) u = u.composed_with(map(a));
    return u;
  }

  /*
   * Value of the eventually periodic word pre (per)^inf.  With U1, U2 the
   * compositions over pre and per, the periodic tail is the fixed point
   * r_(2)/(q_(2)-p_(2)) of U2 and the value is U1 applied to it.  The result
   * is returned UNREDUCED with denominator q_(1)*(q_(2)-p_(2)): that integer
   * is the intrinsic denominator of the word, and reducing it is the caller's
   * explicit decision.
   */
  Rational eval(const EventuallyPeriodicWord& w) const {
    AffineMap u1 = compose_word(w.pre);
    AffineMap u2 = compose_word(w.per);
    Int tail = u2.q - u2.p;
    return Rational(u1.p * u2.r + u1.r * tail, u1.q * tail);
  }

  Interval cylinder(const FiniteWord& w) const { return compose_word(w).apply(hull()); }

  // enclosure of pi(stream) from its first `depth` letters; depth 0 gives the hull
  Interval point_enclosure(const std::function<Letter(std::size_t)>& stream,
                           std::size_t depth) const {
    AffineMap u = AffineMap::identity();
    for (std::size_t i = 0; i < depth; ++i) u = u.composed_with(map(stream(i)));
    return u.apply(hull());
  }

  /*
   * Text format: one "p q r" triple per line, '#' starts a comment, an
   * optional "letters:" line assigns display digits to letters in map order.
   */
  static RationalIFS parse(std::istream& in) {
    std::vector<AffineMap> maps;
    std::vector<std::string> display;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string first;
      if (!(ls >> first)) continue;
      if (first == "letters:") {
        std::string tok;
        while (ls >> tok) display.push_back(tok);
        continue;
      }
      Int p, q, r;
      try {
        p = Int(first);
        std::string qs, rs;
        if (!(ls >> qs >> rs)) throw err_bad_file("map line needs three integers: " + line);
        q = Int(qs);
        r = Int(rs);
      } catch (const std::invalid_argument&) {
        throw err_bad_file("cannot parse map line: " + line);
      }
      std::string extra;
      if (ls >> extra) throw err_bad_file("trailing tokens on map line: " + line);
      maps.emplace_back(p, q, r);
    }
    if (maps.empty()) throw err_bad_file("no maps found");
    return RationalIFS(std::move(maps), std::move(display));
  }

  static RationalIFS parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

 private:
  std::vector<AffineMap> maps_;
  std::vector<std::string> display_;
  Interval hull_;

  Rational branch_low(const AffineMap& u, const Rational& c, const Rational& d) const {
    return u.apply(u.p > 0 ? c : d);
  }
  Rational branch_high(const AffineMap& u, const Rational& c, const Rational& d) const {
    return u.apply(u.p > 0 ? d : c);
  }

  Interval compute_hull() const {
    for (const auto& ua : maps_) {
      for (const auto& ub : maps_) {
        Rational c, d;
        // c = inf u_a([c,d]) and d = sup u_b([c,d]); four sign cases
        if (ua.p > 0 && ub.p > 0) {
          c = ua.fixed_point();
          d = ub.fixed_point();
        } else if (ua.p > 0) {  // ub decreasing: d = u_b(c)
          c = ua.fixed_point();
          d = ub.apply(c);
        } else if (ub.p > 0) {  // ua decreasing: c = u_a(d)
          d = ub.fixed_point();
          c = ua.apply(d);
        } else {
          // c = u_a(d), d = u_b(c): substitute, solve for d
          Int det = ua.q * ub.q - ua.p * ub.p;
          d = Rational(ub.p * ua.r + ub.r * ua.q, det);
          c = ua.apply(d);
        }
        if (c > d) continue;
        Interval candidate(c, d);
        Rational lo = branch_low(maps_[0], c, d), hi = branch_high(maps_[0], c, d);
        bool invariant = true;
        for (const auto& u : maps_) {
          Rational l = branch_low(u, c, d), h = branch_high(u, c, d);
          if (l < c || h > d) {
            invariant = false;
            break;
          }
          lo = std::min(lo, l);
          hi = std::max(hi, h);
        }
        if (invariant && lo == c && hi == d) return candidate;
      }
    }
    throw err_invalid_argument("hull: no invariant attained interval (malformed IFS)");
  }

  bool separation_gap(bool strict) const {
    std::vector<Interval> images;
    for (Letter a = 0; a < maps_.size(); ++a) images.push_back(image_of_hull(a));
    std::sort(images.begin(), images.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    for (std::size_t i = 0; i + 1 < images.size(); ++i) {
      if (strict ? !(images[i].hi < images[i + 1].lo) : !(images[i].hi <= images[i + 1].lo))
        return false;
    }
    return true;
  }
};

}  // namespace rifs
