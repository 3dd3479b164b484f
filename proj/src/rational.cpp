#include "heavy/rational.hpp"

#include <cctype>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace heavy {

namespace {

using wide = __int128;

wide wide_abs(wide v) { return v < 0 ? -v : v; }

wide wide_gcd(wide a, wide b)
{
    a = wide_abs(a);
    b = wide_abs(b);
    while (b != 0) {
        wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(wide v)
{
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_integer(std::string_view digits, std::string_view whole)
{
    if (digits.empty())
        throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
    wide v = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
        v = v * 10 + (c - '0');
        if (!fits(v))
            throw std::overflow_error("number out of range: '" + std::string(whole) + "'");
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(wide num, wide den)
{
    if (den == 0)
        throw std::domain_error("division by zero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    wide g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (!fits(num) || !fits(den))
        throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

std::int64_t Rational::floor() const
{
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0)
        --q;
    return q;
}

Rational Rational::frac() const
{
    std::int64_t r = num_ % den_;
    if (r < 0)
        r += den_;
    Rational out;
    out.num_ = r;
    out.den_ = r == 0 ? 1 : den_;
    return out;
}

double Rational::to_double() const
{
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const
{
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text)
{
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        std::int64_t n = parse_integer(body.substr(0, slash), text);
        std::int64_t d = parse_integer(body.substr(slash + 1), text);
        if (d == 0)
            throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        value = Rational(n, d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = body.substr(0, dot);
        std::string_view frac_part = body.substr(dot + 1);
        if (int_part.empty() && frac_part.empty())
            throw std::invalid_argument("malformed number: '" + std::string(text) + "'");
        std::int64_t whole = int_part.empty() ? 0 : parse_integer(int_part, text);
        std::int64_t scale = 1;
        std::int64_t digits = frac_part.empty() ? 0 : parse_integer(frac_part, text);
        for (std::size_t i = 0; i < frac_part.size(); ++i) {
            if (scale > std::numeric_limits<std::int64_t>::max() / 10)
                throw std::overflow_error("too many decimal digits: '" + std::string(text) + "'");
            scale *= 10;
        }
        value = Rational(whole) + Rational(digits, scale);
    } else {
        value = Rational(parse_integer(body, text));
    }
    return negative ? -value : value;
}

Rational Rational::operator-() const
{
    return from_wide(-static_cast<wide>(num_), den_);
}

Rational& Rational::operator+=(const Rational& rhs)
{
    *this = from_wide(static_cast<wide>(num_) * rhs.den_ + static_cast<wide>(rhs.num_) * den_,
                      static_cast<wide>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs)
{
    *this = from_wide(static_cast<wide>(num_) * rhs.den_ - static_cast<wide>(rhs.num_) * den_,
                      static_cast<wide>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs)
{
    *this = from_wide(static_cast<wide>(num_) * rhs.num_, static_cast<wide>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs)
{
    if (rhs.num_ == 0)
        throw std::domain_error("division by zero");
    *this = from_wide(static_cast<wide>(num_) * rhs.den_, static_cast<wide>(den_) * rhs.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs)
{
    wide l = static_cast<wide>(lhs.num_) * rhs.den_;
    wide r = static_cast<wide>(rhs.num_) * lhs.den_;
    if (l < r)
        return std::strong_ordering::less;
    if (l > r)
        return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r)
{
    return os << r.str();
}

Rational abs(const Rational& r)
{
    return r < Rational(0) ? -r : r;
}

}  // namespace heavy
