#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace einsym {

// Exact rational number. Always kept in lowest terms with a positive
// denominator; zero is 0/1.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  // Accepts "p" or "p/q" with an optional leading minus sign.
  static Rational parse(std::string_view text);

  [[nodiscard]] bool is_zero() const { return sgn(q_) == 0; }
  [[nodiscard]] bool is_one() const { return q_ == 1; }
  [[nodiscard]] int sign() const { return sgn(q_); }
  [[nodiscard]] const mpq_class& get() const { return q_; }
  [[nodiscard]] mpq_class& raw() { return q_; }

  [[nodiscard]] Rational numerator() const { return Rational(mpq_class(q_.get_num())); }
  [[nodiscard]] Rational denominator() const { return Rational(mpq_class(q_.get_den())); }
  [[nodiscard]] Rational abs() const { return Rational(mpq_class(::abs(q_))); }
  [[nodiscard]] Rational inverse() const;
  [[nodiscard]] Rational pow(unsigned e) const;

  // "p" when the denominator is 1, otherwise "p/q".
  [[nodiscard]] std::string str() const;

  Rational& operator+=(const Rational& o) {
    q_ += o.q_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    q_ -= o.q_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    q_ *= o.q_;
    return *this;
  }
  Rational& operator/=(const Rational& o);

  // this += a * b without a temporary Rational.
  void add_product(const Rational& a, const Rational& b);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_{0};
};

}  // namespace einsym
