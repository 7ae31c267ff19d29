#include <gtest/gtest.h>

#include "einsym/rational.hpp"

using einsym::Rational;

TEST(Rational, ReducedForm) {
  Rational r(6, -4);
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(Rational(0, 7).str(), "0");
  EXPECT_EQ(Rational(10, 5).str(), "2");
}

TEST(Rational, Arithmetic) {
  Rational a(1, 3);
  Rational b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_EQ(Rational(-2, 3).pow(3), Rational(-8, 27));
  Rational acc(1);
  acc.add_product(Rational(2), Rational(3, 4));
  EXPECT_EQ(acc, Rational(5, 2));
}

TEST(Rational, ParseRoundTrip) {
  for (const char* s : {"0", "1", "-7", "3/4", "-12/5", "123456789012345678901234567891/2"}) {
    EXPECT_EQ(Rational::parse(s).str(), s);
  }
  EXPECT_EQ(Rational::parse("4/6").str(), "2/3");
}

TEST(Rational, Errors) {
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational::parse("1/0"), std::domain_error);
  EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("1/"), std::invalid_argument);
  EXPECT_THROW(Rational::parse(""), std::invalid_argument);
  EXPECT_THROW(Rational(0).inverse(), std::domain_error);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(-1, 2), Rational(1, 3));
  EXPECT_GT(Rational(2, 3), Rational(1, 2));
}
