#pragma once

// Exact rational numbers with a 64-bit fast path.
//
// Values whose reduced numerator and denominator fit in a signed 64-bit word
// are stored inline. Any operation whose result does not fit is recomputed
// with GMP and the result is carried by an mpq_class until it shrinks again.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qindep {

class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {  // NOLINT: implicit by design of the arithmetic
    if (value == kMin) promote_from(mpq_class(mpz_from(value)));
  }
  Rational(int value) : Rational(static_cast<std::int64_t>(value)) {}  // NOLINT
  Rational(long long num, long long den) { assign(num, den); }
  explicit Rational(const mpq_class& q) { promote_from(q); }

  Rational(const Rational& other)
      : num_(other.num_),
        den_(other.den_),
        big_(other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr) {}
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& other) {
    if (this != &other) {
      num_ = other.num_;
      den_ = other.den_;
      big_ = other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  bool is_small() const { return big_ == nullptr; }
  bool is_zero() const { return big_ ? sgn(*big_) == 0 : num_ == 0; }
  int sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
  }
  bool is_integer() const {
    return big_ ? big_->get_den() == 1 : den_ == 1;
  }

  /// Numerator/denominator when the value is stored inline.
  std::int64_t small_num() const { return num_; }
  std::int64_t small_den() const { return den_; }

  std::optional<std::int64_t> as_int64() const {
    if (big_ || den_ != 1) return std::nullopt;
    return num_;
  }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    mpq_class q(mpz_from(num_), mpz_from(den_));
    q.canonicalize();
    return q;
  }

  std::string str() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p", "-p" or "p/q".
  static Rational parse(std::string_view text) {
    std::string s(text);
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) {
      throw std::invalid_argument("not a rational number: '" + s + "'");
    }
    q.canonicalize();
    return Rational(q);
  }

  Rational operator-() const {
    Rational r(*this);
    if (r.big_) {
      *r.big_ = -*r.big_;
    } else {
      r.num_ = -r.num_;  // kMin is never stored inline
    }
    return r;
  }

  Rational abs() const { return sign() < 0 ? -*this : *this; }

  Rational reciprocal() const {
    if (is_zero()) throw std::domain_error("division by zero");
    if (big_) return Rational(mpq_class(1) / *big_);
    Rational r;
    r.num_ = num_ < 0 ? -den_ : den_;
    r.den_ = num_ < 0 ? -num_ : num_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      Rational r;
      if (small_add(a.num_, a.den_, b.num_, b.den_, r.num_, r.den_)) return r;
    }
    return Rational(a.to_mpq() + b.to_mpq());
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      Rational r;
      if (small_mul(a.num_, a.den_, b.num_, b.den_, r.num_, r.den_)) return r;
    }
    return Rational(a.to_mpq() * b.to_mpq());
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    return a * b.reciprocal();
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      return a.num_ == b.num_ && a.den_ == b.den_;
    }
    if (a.is_small() != b.is_small()) return false;  // both canonical
    return *a.big_ == *b.big_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
      const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
      return lhs <=> rhs;
    }
    const int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  static constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();

  static mpz_class mpz_from(std::int64_t v) {
    mpz_class z;
    const bool neg = v < 0;
    const auto mag = neg ? static_cast<std::uint64_t>(-(v + 1)) + 1u
                         : static_cast<std::uint64_t>(v);
    mpz_import(z.get_mpz_t(), 1, -1, sizeof mag, 0, 0, &mag);
    if (neg) z = -z;
    return z;
  }

  static bool fits(const mpz_class& z, std::int64_t& out) {
    if (z > mpz_class(mpz_from(std::numeric_limits<std::int64_t>::max())) ||
        z <= mpz_class(mpz_from(kMin))) {
      return false;
    }
    std::uint64_t mag = 0;
    std::size_t count = 0;
    mpz_export(&mag, &count, -1, sizeof mag, 0, 0, z.get_mpz_t());
    out = sgn(z) < 0 ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag);
    return true;
  }

  void promote_from(const mpq_class& q) {
    std::int64_t n = 0, d = 0;
    if (fits(q.get_num(), n) && fits(q.get_den(), d)) {
      num_ = n;
      den_ = d;
      big_.reset();
    } else {
      big_ = std::make_unique<mpq_class>(q);
    }
  }

  void assign(long long num, long long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (num == kMin || den == kMin) {
      mpq_class q(mpz_from(num), mpz_from(den));
      q.canonicalize();
      promote_from(q);
      return;
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  static bool checked_mul(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return !__builtin_mul_overflow(a, b, &out) && out != kMin;
  }
  static bool checked_add(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return !__builtin_add_overflow(a, b, &out) && out != kMin;
  }

  static bool small_add(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                        std::int64_t& rn, std::int64_t& rd) {
    if (a == 0) {
      rn = c;
      rd = d;
      return true;
    }
    if (c == 0) {
      rn = a;
      rd = b;
      return true;
    }
    if (b == 1 && d == 1) {
      rd = 1;
      return checked_add(a, c, rn);
    }
    const std::int64_t g = std::gcd(b, d);
    std::int64_t t1 = 0, t2 = 0, t = 0;
    if (!checked_mul(a, d / g, t1) || !checked_mul(c, b / g, t2) || !checked_add(t1, t2, t)) {
      return false;
    }
    if (t == 0) {
      rn = 0;
      rd = 1;
      return true;
    }
    const std::int64_t g2 = std::gcd(t, g);
    rn = t / g2;
    return checked_mul(b / g, d / g2, rd);
  }

  static bool small_mul(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                        std::int64_t& rn, std::int64_t& rd) {
    if (a == 0 || c == 0) {
      rn = 0;
      rd = 1;
      return true;
    }
    const std::int64_t g1 = std::gcd(a, d);
    const std::int64_t g2 = std::gcd(c, b);
    return checked_mul(a / g1, c / g2, rn) && checked_mul(b / g2, d / g1, rd);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

}  // namespace qindep
