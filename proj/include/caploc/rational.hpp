#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace caploc {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exact rational number in canonical form (gcd(|p|, q) = 1, q > 0).
///
/// Locations, distances and welfare values are all Rationals, so equality and
/// strict comparisons are exact. Backed by GMP, so magnitudes are unbounded.
class Rational {
public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator);

  /// Parses "p", "p/q", or a finite decimal ("-0.125", "3.", ".5") with an
  /// optional leading sign. Never goes through binary floating point.
  static Rational parse(std::string_view text);

  std::string numerator_string() const { return value_.get_num().get_str(); }
  std::string denominator_string() const { return value_.get_den().get_str(); }

  /// Canonical "p/q" form; integers render as "p/1".
  std::string to_string() const;
  /// "p" for integers, "p/q" otherwise. Used for human-facing text.
  std::string to_short_string() const;
  /// Decimal rendering rounded to `digits` places (display only).
  std::string to_decimal(int digits = 6) const;
  double to_double() const { return value_.get_d(); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }

  Rational abs() const;
  /// Largest integer <= value.
  long floor() const;

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

  std::size_t hash() const;

private:
  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }
  mpq_class value_{0};
};

inline Rational abs_diff(const Rational& a, const Rational& b) { return (a - b).abs(); }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace caploc

template <>
struct std::hash<caploc::Rational> {
  std::size_t operator()(const caploc::Rational& r) const noexcept { return r.hash(); }
};
