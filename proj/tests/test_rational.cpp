#include <gtest/gtest.h>

#include "quditbell/rational.hpp"

using quditbell::Rational;

TEST(Rational, NormalizesSignAndTerms) {
  const Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(r.to_string(), "-3/2");
  EXPECT_EQ(Rational(8, 2).to_string(), "4");
}

TEST(Rational, ArithmeticAndOrdering) {
  const Rational half(1, 2);
  const Rational third(1, 3);
  EXPECT_EQ(half + third, Rational(5, 6));
  EXPECT_EQ(half - third, Rational(1, 6));
  EXPECT_EQ(half * third, Rational(1, 6));
  EXPECT_EQ(half / third, Rational(3, 2));
  EXPECT_LT(third, half);
  EXPECT_DOUBLE_EQ(Rational(7, 2).to_double(), 3.5);
}

TEST(Rational, RejectsZeroDenominator) {
  EXPECT_THROW(Rational(1, 0), std::invalid_argument);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}
