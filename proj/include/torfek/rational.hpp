#pragma once
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "torfek/errors.hpp"

namespace torfek {

// Exact rational on int64 with int128 intermediates. Polytope data stays
// rational so lattice membership and dilation tests are exact.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw Error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }

    friend Rat operator+(Rat a, Rat b) {
        return Rat(chk(i128(a.num) * b.den + i128(b.num) * a.den), chk(i128(a.den) * b.den));
    }
    friend Rat operator-(Rat a, Rat b) {
        return Rat(chk(i128(a.num) * b.den - i128(b.num) * a.den), chk(i128(a.den) * b.den));
    }
    friend Rat operator*(Rat a, Rat b) { return Rat(chk(i128(a.num) * b.num), chk(i128(a.den) * b.den)); }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num == 0) throw Error("rational division by zero");
        return Rat(chk(i128(a.num) * b.den), chk(i128(a.den) * b.num));
    }
    friend Rat operator-(Rat a) { return Rat(-a.num, a.den); }

    friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rat a, Rat b) { return !(a == b); }
    friend bool operator<(Rat a, Rat b) { return i128(a.num) * b.den < i128(b.num) * a.den; }
    friend bool operator<=(Rat a, Rat b) { return i128(a.num) * b.den <= i128(b.num) * a.den; }
    friend bool operator>(Rat a, Rat b) { return b < a; }
    friend bool operator>=(Rat a, Rat b) { return b <= a; }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

  private:
    using i128 = __int128;
    static std::int64_t chk(i128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw Error("rational overflow");
        return static_cast<std::int64_t>(v);
    }
};

// floor(a) as integer
inline std::int64_t rat_floor(Rat a) {
    std::int64_t q = a.num / a.den;
    if (a.num % a.den != 0 && a.num < 0) --q;
    return q;
}

inline std::int64_t rat_ceil(Rat a) {
    std::int64_t q = a.num / a.den;
    if (a.num % a.den != 0 && a.num > 0) ++q;
    return q;
}

// Exact square root of a nonnegative rational, if it exists.
inline bool rat_sqrt(Rat a, Rat& out) {
    if (a.num < 0) return false;
    auto isqrt = [](std::int64_t v, std::int64_t& r) {
        std::int64_t s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
        for (std::int64_t c = (s > 1 ? s - 2 : 0); c <= s + 2; ++c)
            if (c >= 0 && c * c == v) { r = c; return true; }
        return false;
    };
    std::int64_t rn, rd;
    if (!isqrt(a.num, rn) || !isqrt(a.den, rd)) return false;
    out = Rat(rn, rd);
    return true;
}

}  // namespace torfek
