#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>
#include <utility>

namespace rifs {

using Int = mpz_class;

inline Int int_pow(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Int int_gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// log of a positive big integer, stable for values far beyond double range
inline double log_big(const Int& v) {
  if (v <= 0) throw std::domain_error("log_big: value must be positive");
  signed long exp = 0;
  double d = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(d) + static_cast<double>(exp) * 0.6931471805599453;
}

/*
 * Exact rational with the denominator kept as given: reduction is an explicit
 * operation, never a side effect.  Comparisons cross-multiply, so two
 * representations of the same value compare equal while num()/den() still
 * expose the carried form.  Invariant: den >= 1 (sign lives in the numerator).
 */
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long n) : num_(n), den_(1) {}
  Rational(Int n) : num_(std::move(n)), den_(1) {}
  Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }

  bool is_reduced() const { return int_gcd(num_, den_) == 1; }

  Rational reduced() const {
    Int g = int_gcd(num_, den_);
    if (g == 1) return *this;
    return Rational(num_ / g, den_ / g);
  }

  bool is_integer() const { return num_ % den_ == 0; }

  Int floor() const {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
    return q;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    Int l = a.num_ * b.den_, r = b.num_ * a.den_;
    return l < r ? std::strong_ordering::less
         : l > r ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

  double to_double() const {
    mpq_t q;
    mpq_init(q);
    mpq_set_num(q, num_.get_mpz_t());
    mpq_set_den(q, den_.get_mpz_t());
    double d = mpq_get_d(q);
    mpq_clear(q);
    return d;
  }

  // natural log of a positive rational, safe for huge numerators/denominators
  double log() const {
    if (num_ <= 0) throw std::domain_error("Rational::log: value must be positive");
    return log_big(num_) - log_big(den_);
  }

  std::string str() const {
    if (den_ == 1) return num_.get_str();
    return num_.get_str() + "/" + den_.get_str();
  }

  // stable identity key for hashing orbit states; callers pass reduced values
  std::string key() const { return num_.get_str() + "/" + den_.get_str(); }

 private:
  Int num_, den_;
};

inline Rational rat(long n, long d) { return Rational(Int(n), Int(d)); }

/*
 * Closed interval [lo, hi] with exact rational endpoints.  Used as a rigorous
 * enclosure: any statement proved for the interval holds for every point of it.
 */
struct Interval {
  Rational lo, hi;

  Interval() = default;
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::domain_error("Interval: lo > hi");
  }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / Rational(2); }

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool intersects(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

// range of |x - y| over x in a, y in b
inline Interval distance_bounds(const Interval& a, const Interval& b) {
  Rational up = std::max(a.hi - b.lo, b.hi - a.lo);
  Rational low(0);
  if (b.lo > a.hi) low = b.lo - a.hi;
  if (a.lo > b.hi) low = a.lo - b.hi;
  return Interval(low, up);
}

// range of |x - c| over x in a
inline Interval abs_offset(const Interval& a, const Rational& c) {
  Rational d1 = (a.lo - c).abs(), d2 = (a.hi - c).abs();
  if (a.contains(c)) return Interval(Rational(0), std::max(d1, d2));
  return Interval(std::min(d1, d2), std::max(d1, d2));
}

}  // namespace rifs
