#include "polyvar/rational.hpp"

#include <numeric>

#include "polyvar/error.hpp"

namespace polyvar {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(errc::overflow, "rational product exceeds 64-bit range");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error(errc::overflow, "rational sum exceeds 64-bit range");
  return r;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(errc::degenerate_input, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : num;
  den_ = g ? den / g : den;
}

double Rational::to_double() const {
  // long double has a 64-bit mantissa here, so the quotient of two
  // 64-bit integers rounds to double within 1 ulp.
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t lhs = checked_mul(a.num_, b.den_ / g);
  const std::int64_t rhs = checked_mul(b.num_, a.den_ / g);
  return Rational(checked_add(lhs, rhs), checked_mul(a.den_, b.den_ / g));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce before multiplying to keep intermediates small.
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2),
                  checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw Error(errc::degenerate_input, "division by zero rational");
  return a * Rational(b.den_, b.num_);
}

}  // namespace polyvar
