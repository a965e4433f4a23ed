#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rifs/errors.hpp"
#include "rifs/exact.hpp"

namespace rifs {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = m > 1 ? 1 : 0;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

// deterministic Miller-Rabin; the 12-witness set decides every 64-bit integer
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/*
 * Brent's cycle variant of Pollard rho with the classic x^2 + c step.  The c
 * offsets are tried in a fixed order, so factorizations are reproducible run
 * to run.
 */
inline std::uint64_t pollard_brent_u64(std::uint64_t n) {
  if ((n & 1) == 0) return 2;
  for (std::uint64_t c = 1; c < 64; ++c) {
    std::uint64_t x = 2, y = 2, d = 1;
    std::uint64_t power = 1, lam = 1;
    while (d == 1) {
      if (power == lam) {
        x = y;
        power <<= 1;
        lam = 0;
      }
      y = (mulmod_u64(y, y, n) + c) % n;
      ++lam;
      std::uint64_t diff = x > y ? x - y : y - x;
      if (diff == 0) break;  // cycle without factor; try next c
      d = std::gcd(diff, n);
    }
    if (d != 1 && d != n) return d;
  }
  throw Error("FactorizationIncomplete", "rho failed on " + std::to_string(n));
}

inline void factor_u64(std::uint64_t n, std::map<Int, int>& out) {
  // peel small primes first; rho handles whatever survives
  for (std::uint64_t p = 2; p <= 1000000ull && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++out[Int(static_cast<unsigned long>(p))];
      n /= p;
    }
  }
  if (n == 1) return;
  if (is_prime_u64(n)) {
    ++out[Int(static_cast<unsigned long>(n))];
    return;
  }
  std::uint64_t f = pollard_brent_u64(n);
  factor_u64(f, out);
  factor_u64(n / f, out);
}

inline bool is_probable_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

/*
 * Full factorization.  Everything below 2^64 is decided deterministically
 * (trial division + Miller-Rabin + Brent rho); larger values use GMP rho with
 * a step cap and throw FactorizationIncomplete rather than return a partial
 * or unverified answer.
 */
inline std::map<Int, int> factorize(const Int& n) {
  if (n < 1) throw err_invalid_argument("factorize: n must be >= 1");
  std::map<Int, int> out;
  if (n == 1) return out;
  if (n.fits_ulong_p() || mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    std::uint64_t v = 0;
    mpz_export(&v, nullptr, -1, sizeof(v), 0, 0, n.get_mpz_t());
    factor_u64(v, out);
    return out;
  }
  Int rest = n;
  for (std::uint64_t p = 2; p <= 1000000ull; p += (p == 2 ? 1 : 2)) {
    while (rest % static_cast<unsigned long>(p) == 0) {
      ++out[Int(static_cast<unsigned long>(p))];
      rest /= static_cast<unsigned long>(p);
    }
    if (rest == 1) return out;
  }
  // recursive split of the big cofactor
  struct Splitter {
    std::map<Int, int>& acc;
    void split(const Int& v) {
      if (v == 1) return;
      if (mpz_sizeinbase(v.get_mpz_t(), 2) <= 64) {
        std::uint64_t u = 0;
        mpz_export(&u, nullptr, -1, sizeof(u), 0, 0, v.get_mpz_t());
        factor_u64(u, acc);
        return;
      }
      if (is_probable_prime(v)) {
        ++acc[v];
        return;
      }
      for (unsigned long c = 1; c <= 32; ++c) {
        Int x = 2, y = 2, d = 1;
        for (long i = 0; i < 2000000 && d == 1; ++i) {
          x = (x * x + c) % v;
          y = (y * y + c) % v;
          y = (y * y + c) % v;
          d = int_gcd(abs(x - y), v);
        }
        if (d != 1 && d != v) {
          split(d);
          split(v / d);
          return;
        }
      }
      throw Error("FactorizationIncomplete", "rho failed on " + v.get_str());
    }
  } splitter{out};
  splitter.split(rest);
  return out;
}

inline Int divisor_count(const Int& n) {
  Int t = 1;
  for (const auto& [p, e] : factorize(n)) t *= Int(e + 1);
  return t;
}

inline Int totient_from_factors(const std::map<Int, int>& f) {
  Int t = 1;
  for (const auto& [p, e] : f) {
    t *= p - 1;
    for (int i = 1; i < e; ++i) t *= p;
  }
  return t;
}

/*
 * Multiplicative order of d modulo m (gcd(d, m) = 1).  Start from phi(m) and
 * strip prime factors while the power still fixes 1.  Convention: order
 * modulo 1 is 1.
 */
inline Int multiplicative_order(const Int& d, const Int& m) {
  if (m < 1) throw err_invalid_argument("multiplicative_order: modulus must be >= 1");
  if (m == 1) return 1;
  if (int_gcd(d % m, m) != 1)
    throw err_invalid_argument("multiplicative_order: base and modulus share a factor");
  Int phi = totient_from_factors(factorize(m));
  Int order = phi;
  auto powm = [&](const Int& e) {
    Int r;
    mpz_powm(r.get_mpz_t(), d.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
  };
  for (const auto& [p, e] : factorize(phi)) {
    for (int i = 0; i < e; ++i) {
      Int candidate = order / p;
      if (order % p == 0 && powm(candidate) == 1)
        order = candidate;
      else
        break;
    }
  }
  return order;
}

/*
 * Disk-backed factorization cache (JSON map from decimal value to [prime,
 * exponent] pairs).  Used by the census diagnostics where the same 3^m - 1
 * values recur across runs.
 */
class FactorCache {
 public:
  FactorCache() = default;
  explicit FactorCache(std::string path) : path_(std::move(path)) { load(); }

  std::map<Int, int> factorize_cached(const Int& n) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(n.get_str());
      if (it != cache_.end()) return from_json(it->second);
    }
    std::map<Int, int> f = factorize(n);
    {
      std::lock_guard<std::mutex> lock(mu_);
      cache_[n.get_str()] = to_json(f);
      dirty_ = true;
    }
    return f;
  }

  void save() {
    std::lock_guard<std::mutex> lock(mu_);
    if (path_.empty() || !dirty_) return;
    nlohmann::json j(cache_);
    std::ofstream out(path_);
    out << j.dump(1) << "\n";
    dirty_ = false;
  }

  ~FactorCache() {
    try {
      save();
    } catch (...) {
    }
  }

 private:
  using Entry = std::vector<std::pair<std::string, int>>;

  static Entry to_json(const std::map<Int, int>& f) {
    Entry e;
    for (const auto& [p, k] : f) e.emplace_back(p.get_str(), k);
    return e;
  }

  static std::map<Int, int> from_json(const Entry& e) {
    std::map<Int, int> f;
    for (const auto& [p, k] : e) f[Int(p)] = k;
    return f;
  }

  void load() {
    std::ifstream in(path_);
    if (!in) return;
    nlohmann::json j;
    try {
      in >> j;
      cache_ = j.get<std::map<std::string, Entry>>();
    } catch (...) {
      cache_.clear();
    }
  }

  std::string path_;
  std::map<std::string, Entry> cache_;
  std::mutex mu_;
  bool dirty_ = false;
};

}  // namespace rifs
