#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace msra {

inline std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
}

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        auto next = checked_mul(r, base);
        if (!next) return std::nullopt;
        r = *next;
    }
    return r;
}

/// Exact nonnegative rational, always reduced. Bandwidth ratios are compared
/// with exact equality, so no floating point anywhere on this path.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational() = default;
    Rational(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        std::uint64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    Rational mul(const Rational& o) const {
        // Cross-reduce first so intermediate products stay small.
        std::uint64_t g1 = std::gcd(num, o.den);
        std::uint64_t g2 = std::gcd(o.num, den);
        auto n = checked_mul(num / g1, o.num / g2);
        auto d = checked_mul(den / g2, o.den / g1);
        if (!n || !d) throw std::overflow_error("rational product overflows u64");
        return Rational(*n, *d);
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

    bool operator<(const Rational& o) const {
        return static_cast<unsigned __int128>(num) * o.den <
               static_cast<unsigned __int128>(o.num) * den;
    }
    bool operator>(const Rational& o) const { return o < *this; }

    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

    /// Decimal expansion rounded half-up to `digits` places, computed with
    /// integer arithmetic so it always agrees with the exact value.
    std::string to_decimal(unsigned digits = 6) const {
        unsigned __int128 scale = 1;
        for (unsigned i = 0; i < digits; ++i) scale *= 10;
        unsigned __int128 scaled = (static_cast<unsigned __int128>(num) * scale + den / 2) / den;
        unsigned __int128 whole = scaled / scale;
        unsigned __int128 frac = scaled % scale;
        std::string w;
        if (whole == 0) {
            w = "0";
        } else {
            while (whole > 0) {
                w.insert(w.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
                whole /= 10;
            }
        }
        if (digits == 0) return w;
        std::string fstr(digits, '0');
        for (unsigned i = digits; i-- > 0;) {
            fstr[i] = static_cast<char>('0' + static_cast<int>(frac % 10));
            frac /= 10;
        }
        return w + "." + fstr;
    }
};

}  // namespace msra
