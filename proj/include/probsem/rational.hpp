#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>

namespace probsem {

// Arbitrary-precision integer used for program values.
using Int = mpz_class;

std::string rational_to_string(const mpq_class& q);

// Parses "3/16", "42", "-1/2", "0.25", "2.5e-3", "1e-9" into an exact rational.
mpq_class parse_rational(const std::string& text);

// Exact non-negative rational, always kept in canonical reduced form.
// This is the numeric type for probability weights, expectation values and
// tolerances; subtraction is checked so mass can never silently go negative.
class Weight {
public:
  Weight() : q_(0) {}
  Weight(unsigned long n) : q_(static_cast<long>(n)) {}
  Weight(const Int& num, const Int& den) : q_(num, den) {
    if (den == 0) throw std::invalid_argument("weight with zero denominator");
    q_.canonicalize();
    check_sign();
  }
  explicit Weight(mpq_class q) : q_(std::move(q)) {
    q_.canonicalize();
    check_sign();
  }

  static Weight parse(const std::string& text) { return Weight(parse_rational(text)); }

  static Weight one() { return Weight(1ul); }

  const mpq_class& value() const { return q_; }
  Int numerator() const { return q_.get_num(); }
  Int denominator() const { return q_.get_den(); }
  bool is_zero() const { return sgn(q_) == 0; }

  std::string str() const { return rational_to_string(q_); }

  Weight& operator+=(const Weight& o) {
    q_ += o.q_;
    return *this;
  }
  Weight& operator*=(const Weight& o) {
    q_ *= o.q_;
    return *this;
  }
  Weight& operator-=(const Weight& o) {
    q_ -= o.q_;
    if (sgn(q_) < 0) throw std::underflow_error("weight subtraction went negative");
    return *this;
  }

  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator*(Weight a, const Weight& b) { return a *= b; }
  friend Weight operator-(Weight a, const Weight& b) { return a -= b; }
  friend Weight operator/(const Weight& a, const Weight& b) {
    if (b.is_zero()) throw std::domain_error("weight division by zero");
    return Weight(mpq_class(a.q_ / b.q_));
  }

  friend bool operator==(const Weight& a, const Weight& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Weight& a, const Weight& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  // |a - b| without the non-negativity check tripping.
  static Weight abs_diff(const Weight& a, const Weight& b) {
    return a >= b ? a - b : b - a;
  }

private:
  void check_sign() const {
    if (sgn(q_) < 0) throw std::invalid_argument("negative weight: " + rational_to_string(q_));
  }

  mpq_class q_;
};

}  // namespace probsem
