#include "einsym/rational.hpp"

#include <stdexcept>

namespace einsym {

Rational::Rational(long num, long den) : q_(num, den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  q_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Rational::parse: empty string");
  std::size_t start = (text[0] == '-') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '/') {
      if (seen_slash || !digit_before) throw std::invalid_argument("Rational::parse: bad fraction");
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw std::invalid_argument("Rational::parse: unexpected character in '" +
                                  std::string(text) + "'");
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) {
    throw std::invalid_argument("Rational::parse: malformed '" + std::string(text) + "'");
  }
  mpq_class q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw std::invalid_argument("Rational::parse: malformed '" + std::string(text) + "'");
  }
  if (sgn(q.get_den()) == 0) throw std::domain_error("Rational::parse: zero denominator");
  q.canonicalize();
  return Rational(std::move(q));
}

Rational Rational::inverse() const {
  if (is_zero()) throw std::domain_error("Rational: inverse of zero");
  return Rational(mpq_class(1 / q_));
}

Rational Rational::pow(unsigned e) const {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), q_.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q_.get_den_mpz_t(), e);
  return Rational(mpq_class(num, den));
}

std::string Rational::str() const { return q_.get_str(10); }

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  q_ /= o.q_;
  return *this;
}

void Rational::add_product(const Rational& a, const Rational& b) {
  thread_local mpq_class tmp;
  mpq_mul(tmp.get_mpq_t(), a.q_.get_mpq_t(), b.q_.get_mpq_t());
  q_ += tmp;
}

}  // namespace einsym
