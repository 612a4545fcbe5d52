#include <gtest/gtest.h>

#include "sponsored/rational.hpp"

using sponsored::ParameterError;
using sponsored::ParseError;
using sponsored::Rational;

TEST(Rational, ParsesFractionsIntegersAndDecimalsExactly) {
    EXPECT_EQ(Rational::parse("3/6"), Rational(1, 2));
    EXPECT_EQ(Rational::parse("-4"), Rational(-4));
    EXPECT_EQ(Rational::parse("0.3"), Rational(3, 10));
    EXPECT_EQ(Rational::parse("1.5e-3"), Rational(3, 2000));
    EXPECT_EQ(Rational::parse("2E2"), Rational(200));
    EXPECT_EQ(Rational::parse(" 7/2 "), Rational(7, 2));
}

TEST(Rational, RejectsMalformedText) {
    for (const char* bad : {"", "abc", "1/0", "1//2", "0.3.1", "1e", "--1", "1/-"})
        EXPECT_THROW(Rational::parse(bad), ParseError) << bad;
}

TEST(Rational, CanonicalStringForm) {
    EXPECT_EQ(Rational(6, -4).str(), "-3/2");
    EXPECT_EQ(Rational(10, 5).str(), "2");
    EXPECT_EQ(Rational().str(), "0");
}

TEST(Rational, DecimalRendering) {
    EXPECT_EQ(Rational(81, 4).decimal(), "20.25");
    EXPECT_EQ(Rational(3, 5).decimal(), "0.6");
    EXPECT_EQ(Rational(1, 3).decimal(), "0.333333");
    EXPECT_EQ(Rational(2, 3).decimal(3), "0.667");
    EXPECT_EQ(Rational(-2, 3).decimal(3), "-0.667");
    EXPECT_EQ(Rational(13500, 1349).decimal(), "10.0074");
    EXPECT_EQ(Rational(1, 900).decimal(), "0.00111111");
    EXPECT_EQ(Rational(123456789).decimal(3), "123000000");
    EXPECT_EQ(Rational(0).decimal(), "0");
    EXPECT_EQ(Rational(999999, 1000000).decimal(3), "1");
}

TEST(Rational, ArithmeticAndOrdering) {
    const Rational a(1, 3), b(1, 6);
    EXPECT_EQ(a + b, Rational(1, 2));
    EXPECT_EQ(a - b, b);
    EXPECT_EQ(a * b, Rational(1, 18));
    EXPECT_EQ(a / b, Rational(2));
    EXPECT_LT(b, a);
    EXPECT_EQ(max(a, b), a);
    EXPECT_THROW(a / Rational(0), ParameterError);
    EXPECT_THROW(Rational(1, 0), ParameterError);
}
