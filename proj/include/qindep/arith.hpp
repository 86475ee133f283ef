#pragma once

// Elementary integer arithmetic: factorization, totient, modular helpers.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qindep {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PrimePower {
  std::int64_t prime = 0;
  int exponent = 0;

  std::int64_t value() const {
    std::int64_t v = 1;
    for (int i = 0; i < exponent; ++i) v *= prime;
    return v;
  }
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::vector<PrimePower>;

/// Trial-division factorization, primes strictly increasing.
inline Factorization factor(std::int64_t n) {
  if (n < 2) throw InvalidInput("factor: n must be at least 2, got " + std::to_string(n));
  Factorization out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    PrimePower pp{p, 0};
    while (n % p == 0) {
      n /= p;
      ++pp.exponent;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

inline std::int64_t euler_phi(std::int64_t n) {
  if (n == 1) return 1;
  std::int64_t phi = n;
  for (const auto& pp : factor(n)) phi = phi / pp.prime * (pp.prime - 1);
  return phi;
}

inline std::int64_t radical_of(std::int64_t n) {
  if (n == 1) return 1;
  std::int64_t r = 1;
  for (const auto& pp : factor(n)) r *= pp.prime;
  return r;
}

inline bool is_square_free(std::int64_t n) { return n == 1 || radical_of(n) == n; }

inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

/// Inverse of a modulo n; requires gcd(a, n) = 1.
inline std::int64_t mod_inverse(std::int64_t a, std::int64_t n) {
  std::int64_t old_r = mod(a, n), r = n, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw InvalidInput("mod_inverse: not a unit");
  return mod(old_s, n);
}

inline std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

}  // namespace qindep
