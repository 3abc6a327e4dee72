#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace agtensor {

namespace detail {

inline std::int64_t narrow_128(__int128 v, const char* what) {
    if (v > __int128(INT64_MAX) || v < __int128(INT64_MIN))
        throw std::overflow_error(std::string("Rational: overflow in ") + what);
    return std::int64_t(v);
}

}  // namespace detail

/// Exact rational arithmetic on int64 numerator/denominator, normalized so
/// that the denominator is positive and gcd(num, den) == 1.  Intermediate
/// products go through 128-bit integers and overflow raises instead of
/// wrapping; the quantities handled here (cell counts, grid areas, sampled
/// parameter tuples) stay far below the limits.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t value) : num_(value), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = __int128(a.num_) * b.den_ + __int128(b.num_) * a.den_;
        __int128 d = __int128(a.den_) * b.den_;
        return make_128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = __int128(a.num_) * b.den_ - __int128(b.num_) * a.den_;
        __int128 d = __int128(a.den_) * b.den_;
        return make_128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make_128(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return make_128(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return __int128(a.num_) * b.den_ < __int128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// "p/q" (or just "p" when the denominator is 1).
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Truncated decimal expansion, for human-readable report columns only.
    std::string decimal_str(int digits = 9) const {
        std::int64_t n = num_;
        std::string out;
        if (n < 0) {
            out += '-';
            n = -n;
        }
        out += std::to_string(n / den_);
        n %= den_;
        if (digits > 0) {
            out += '.';
            for (int i = 0; i < digits; ++i) {
                n = detail::narrow_128(__int128(n) * 10, "decimal_str");
                out += char('0' + n / den_);
                n %= den_;
            }
        }
        return out;
    }

    /// Parses "p/q", "p", or a plain decimal such as "0.005" (exact).
    static Rational parse(const std::string& text) {
        if (text.empty()) throw std::invalid_argument("Rational: empty string");
        auto slash = text.find('/');
        if (slash != std::string::npos) {
            std::int64_t p = std::stoll(text.substr(0, slash));
            std::int64_t q = std::stoll(text.substr(slash + 1));
            return Rational(p, q);
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) return Rational(std::stoll(text));
        std::string head = text.substr(0, dot), tail = text.substr(dot + 1);
        bool negative = !head.empty() && head[0] == '-';
        if (negative) head = head.substr(1);
        if (head.empty()) head = "0";
        std::int64_t den = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) {
            den = detail::narrow_128(__int128(den) * 10, "parse");
        }
        std::int64_t num = detail::narrow_128(
            __int128(std::stoll(head)) * den + __int128(tail.empty() ? 0 : std::stoll(tail)),
            "parse");
        return Rational(negative ? -num : num, den);
    }

private:
    static Rational make_128(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd_128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = detail::narrow_128(n, "arithmetic");
        r.den_ = detail::narrow_128(d, "arithmetic");
        return r;
    }

    static __int128 gcd_128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_;
    std::int64_t den_;
};

/// Floor of sqrt(r) for a non-negative rational, i.e. the largest integer t
/// with t^2 <= r.  Used for exact derived integer constants.
inline std::int64_t floor_sqrt(const Rational& r) {
    if (r.sign() < 0) throw std::domain_error("floor_sqrt: negative argument");
    // Initial estimate in floating point, then exact adjustment.
    double approx = std::int64_t(r.numerator()) / double(r.denominator());
    std::int64_t t = std::int64_t(__builtin_sqrt(approx));
    while (t > 0 && __int128(t) * t * r.denominator() > __int128(r.numerator())) --t;
    while (__int128(t + 1) * (t + 1) * r.denominator() <= __int128(r.numerator())) ++t;
    return t;
}

namespace detail {

// Squared comparisons must fit in 128 bits; estimate first so an out-of-range
// request raises instead of silently wrapping.
inline void check_square_range(const Rational& value, std::int64_t scale,
                               const Rational& eps) {
    long double vn = value.numerator() < 0 ? -(long double)value.numerator()
                                           : (long double)value.numerator();
    long double lhs = vn * vn * (long double)eps.denominator();
    long double rhs = (long double)scale * scale * (long double)eps.numerator() *
                      (long double)value.denominator() * (long double)value.denominator();
    if (lhs > 1e36L || rhs > 1e36L)
        throw std::overflow_error("sqrt-scaled comparison out of supported range");
}

}  // namespace detail

/// value <= scale * sqrt(eps), decided exactly by squaring.
/// Requires scale >= 0 and eps >= 0.
inline bool le_sqrt_scaled(const Rational& value, std::int64_t scale, const Rational& eps) {
    if (scale < 0 || eps.sign() < 0)
        throw std::domain_error("le_sqrt_scaled: negative scale or eps");
    if (value.sign() <= 0) return true;
    detail::check_square_range(value, scale, eps);
    // value^2 <= scale^2 * eps  <=>  vn^2 * ed <= s^2 * en * vd^2
    __int128 lhs = __int128(value.numerator()) * value.numerator() * eps.denominator();
    __int128 rhs = __int128(scale) * scale * eps.numerator();
    rhs *= __int128(value.denominator()) * value.denominator();
    return lhs <= rhs;
}

/// value < scale * sqrt(eps), decided exactly by squaring.
inline bool lt_sqrt_scaled(const Rational& value, std::int64_t scale, const Rational& eps) {
    if (scale < 0 || eps.sign() < 0)
        throw std::domain_error("lt_sqrt_scaled: negative scale or eps");
    if (value.sign() < 0) return true;
    if (value.sign() == 0) return scale > 0 && eps.sign() > 0;
    detail::check_square_range(value, scale, eps);
    __int128 lhs = __int128(value.numerator()) * value.numerator() * eps.denominator();
    __int128 rhs = __int128(scale) * scale * eps.numerator();
    rhs *= __int128(value.denominator()) * value.denominator();
    return lhs < rhs;
}

inline bool gt_sqrt_scaled(const Rational& value, std::int64_t scale, const Rational& eps) {
    return !le_sqrt_scaled(value, scale, eps);
}

inline bool ge_sqrt_scaled(const Rational& value, std::int64_t scale, const Rational& eps) {
    return !lt_sqrt_scaled(value, scale, eps);
}

}  // namespace agtensor
