#ifndef POLYVAR_RATIONAL_HPP
#define POLYVAR_RATIONAL_HPP

#include <cstdint>
#include <string>

namespace polyvar {

// Exact rational on checked 64-bit integers, always stored in lowest
// terms with a positive denominator.  Arithmetic that would leave the
// 64-bit range throws overflow rather than wrapping; the quantities
// this project needs (Dirichlet and sphere moments) stay far inside it.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const;
  std::string to_string() const;

  Rational operator-() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

 private:
  std::int64_t num_, den_;
};

}  // namespace polyvar

#endif
