#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "sponsored/errors.hpp"

namespace sponsored {

/// Exact rational number backed by GMP. Always canonical (lowest terms,
/// positive denominator).
class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I value)  // NOLINT(google-explicit-constructor)
        : value_(static_cast<long>(value)) {}

    Rational(long numerator, long denominator) {
        if (denominator == 0) throw ParameterError("rational with zero denominator");
        value_ = mpq_class(numerator, 1) / mpq_class(denominator, 1);
        value_.canonicalize();
    }

    explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    /// Parses "p/q", an integer, or a decimal literal such as "-0.25" or
    /// "1.5e-3". The conversion is exact.
    static Rational parse(std::string_view text);

    const mpq_class& raw() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    int sign() const { return sgn(value_); }
    bool is_zero() const { return sign() == 0; }
    bool is_positive() const { return sign() > 0; }
    bool is_negative() const { return sign() < 0; }

    /// "p/q", or "p" when the denominator is 1.
    std::string str() const {
        if (value_.get_den() == 1) return value_.get_num().get_str();
        return value_.get_num().get_str() + "/" + value_.get_den().get_str();
    }

    /// Decimal rendering rounded (half away from zero) to `significant` digits,
    /// without exponent notation and without trailing zeros.
    std::string decimal(int significant = 6) const;

    double to_double() const { return value_.get_d(); }

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw ParameterError("division by zero");
        value_ /= o.value_;
        return *this;
    }

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

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class value_{0};
};

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline mpz_class pow10(unsigned long exponent) {
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
    return result;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline Rational Rational::parse(std::string_view text) {
    const std::string_view original = text;
    auto fail = [&]() -> Rational {
        throw ParseError("malformed rational literal '" + std::string(original) + "'");
    };
    text = detail::trim(text);
    if (text.empty()) return fail();

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    mpq_class value;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = text.substr(0, slash);
        const auto den = text.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den)) return fail();
        mpz_class d(std::string(den), 10);
        if (d == 0) throw ParseError("zero denominator in '" + std::string(original) + "'");
        value = mpq_class(mpz_class(std::string(num), 10), d);
    } else {
        long exponent = 0;
        if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_text = text.substr(e + 1);
            bool exp_negative = false;
            if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
                exp_negative = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            if (!detail::all_digits(exp_text) || exp_text.size() > 6) return fail();
            exponent = std::stol(std::string(exp_text));
            if (exp_negative) exponent = -exponent;
            text = text.substr(0, e);
        }
        std::string_view integral = text;
        std::string_view fraction;
        if (const auto dot = text.find('.'); dot != std::string_view::npos) {
            integral = text.substr(0, dot);
            fraction = text.substr(dot + 1);
        }
        if (integral.empty() && fraction.empty()) return fail();
        if (!integral.empty() && !detail::all_digits(integral)) return fail();
        if (!fraction.empty() && !detail::all_digits(fraction)) return fail();
        const std::string digits = std::string(integral) + std::string(fraction);
        mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
        exponent -= static_cast<long>(fraction.size());
        if (exponent >= 0)
            value = mpq_class(mantissa * detail::pow10(static_cast<unsigned long>(exponent)), 1);
        else
            value = mpq_class(mantissa, detail::pow10(static_cast<unsigned long>(-exponent)));
    }
    value.canonicalize();
    if (negative) value = -value;
    return Rational(std::move(value));
}

inline std::string Rational::decimal(int significant) const {
    if (significant < 1) significant = 1;
    if (is_zero()) return "0";

    mpz_class num = abs(value_.get_num());
    const mpz_class& den = value_.get_den();

    // Largest e with 10^e <= num/den.
    long e = static_cast<long>(num.get_str().size()) - static_cast<long>(den.get_str().size());
    auto at_least = [&](long exp) {
        if (exp >= 0) return num >= den * detail::pow10(static_cast<unsigned long>(exp));
        return num * detail::pow10(static_cast<unsigned long>(-exp)) >= den;
    };
    while (!at_least(e)) --e;
    while (at_least(e + 1)) ++e;

    // scaled = round(|x| * 10^(significant-1-e))
    const long shift = significant - 1 - e;
    mpz_class scaled_num = num;
    mpz_class scaled_den = den;
    if (shift >= 0)
        scaled_num *= detail::pow10(static_cast<unsigned long>(shift));
    else
        scaled_den *= detail::pow10(static_cast<unsigned long>(-shift));
    mpz_class q = scaled_num / scaled_den;
    const mpz_class r = scaled_num - q * scaled_den;
    if (2 * r >= scaled_den) ++q;

    long point = e + 1;  // digits before the decimal point
    std::string digits = q.get_str();
    if (static_cast<long>(digits.size()) > significant) {
        // rounding carried into a new leading digit
        digits.pop_back();
        ++point;
    }

    std::string out;
    if (point <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    } else if (point >= static_cast<long>(digits.size())) {
        out = digits + std::string(static_cast<std::size_t>(point - static_cast<long>(digits.size())), '0');
    } else {
        out = digits.substr(0, static_cast<std::size_t>(point)) + "." + digits.substr(static_cast<std::size_t>(point));
    }
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return is_negative() ? "-" + out : out;
}

}  // namespace sponsored
