#include "caploc/rational.hpp"

#include <cctype>
#include <ostream>

namespace caploc {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

mpz_class parse_digits(std::string_view s) {
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) throw std::domain_error("Rational: zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> ParseError {
    return ParseError("malformed number '" + original + "'");
  };
  // trim surrounding whitespace
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw fail();

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  mpq_class value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    mpz_class d = parse_digits(den);
    if (d == 0) throw ParseError("zero denominator in '" + original + "'");
    value = mpq_class(parse_digits(num), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) throw fail();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class digits = parse_digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
    value = mpq_class(digits, scale);
  } else {
    if (!all_digits(text)) throw fail();
    value = mpq_class(parse_digits(text));
  }
  value.canonicalize();
  if (negative) value = -value;
  return Rational(std::move(value));
}

std::string Rational::to_string() const {
  return numerator_string() + "/" + denominator_string();
}

std::string Rational::to_short_string() const {
  return is_integer() ? numerator_string() : to_string();
}

std::string Rational::to_decimal(int digits) const {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  // round half away from zero
  mpq_class scaled = ::abs(value_) * scale;
  mpz_class q = scaled.get_num() / scaled.get_den();
  mpz_class r = scaled.get_num() % scaled.get_den();
  if (2 * r >= scaled.get_den()) q += 1;
  std::string s = q.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(value_) < 0 && q != 0) s.insert(0, "-");
  return s;
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(value_))); }

long Rational::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  if (!q.fits_slong_p()) throw std::overflow_error("Rational::floor out of range");
  return q.get_si();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  value_ /= o.value_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_short_string(); }

std::size_t Rational::hash() const {
  const std::hash<std::string> h;
  return h(numerator_string()) * 31u ^ h(denominator_string());
}

}  // namespace caploc
