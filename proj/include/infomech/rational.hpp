#pragma once

// Exact rational arithmetic on arbitrary-precision integers.
//
// Quantities of order eps^(2^m+1) appear in the gap constructions; comparing
// them in floating point loses every meaningful digit, so all construction
// identities are checked in Rational and converted to double only at the
// final reporting step.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace infomech {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Invariants: denominator > 0 and
/// gcd(|numerator|, denominator) == 1 after every operation.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}

  Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  static Rational from_integer_fraction(std::int64_t num, std::int64_t den) {
    return Rational(BigInt(num), BigInt(den));
  }

  /// Parses "p", "-p" or "p/q".
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

  Rational operator-() const { return Rational(raw_tag{}, -num_, den_); }

  Rational& operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  /// Total order via cross multiplication; exact.
  friend int cmp(const Rational& a, const Rational& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
  }
  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a, b) >= 0; }

  Rational pow(unsigned e) const {
    Rational result(1);
    Rational base = *this;
    while (e > 0) {
      if (e & 1u) result *= base;
      base *= base;
      e >>= 1u;
    }
    return result;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  double to_double() const {
    using boost::multiprecision::cpp_rational;
    return cpp_rational(num_, den_).convert_to<double>();
  }

  /// Serializes as "p/q" (denominator always present).
  std::string to_string() const { return num_.str() + "/" + den_.str(); }

 private:
  struct raw_tag {};
  Rational(raw_tag, BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {}

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace infomech
