#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "tfa/common.hpp"

namespace tfa {

// Exact rational on int64 with __int128 cross products. Magnitudes here stay
// small (dyadic scales times thirds times single-digit dilation factors), so
// overflow is not a practical concern; normalize() keeps terms reduced.
struct rat {
    int64_t num = 0;
    int64_t den = 1;

    rat() = default;
    rat(int64_t n) : num(n), den(1) {}
    rat(int64_t n, int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        require(den != 0, "rat: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    double to_double() const { return double(num) / double(den); }

    friend rat operator+(rat a, rat b) { return rat(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend rat operator-(rat a, rat b) { return rat(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend rat operator*(rat a, rat b) { return rat(a.num * b.num, a.den * b.den); }
    friend rat operator/(rat a, rat b) {
        require(b.num != 0, "rat: division by zero");
        return rat(a.num * b.den, a.den * b.num);
    }
    friend rat operator-(rat a) { rat r; r.num = -a.num; r.den = a.den; return r; }

    friend bool operator==(const rat& a, const rat& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const rat& a, const rat& b) { return !(a == b); }
    friend bool operator<(const rat& a, const rat& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const rat& a, const rat& b) { return !(b < a); }
    friend bool operator>(const rat& a, const rat& b) { return b < a; }
    friend bool operator>=(const rat& a, const rat& b) { return !(a < b); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

inline rat rat_pow2(int e) {  // 2^e as a rational, e may be negative
    rat r;
    if (e >= 0) { r.num = int64_t(1) << e; r.den = 1; }
    else        { r.num = 1; r.den = int64_t(1) << (-e); }
    return r;
}

inline rat rat_abs(rat a) { if (a.num < 0) a.num = -a.num; return a; }
inline rat rat_min(rat a, rat b) { return a < b ? a : b; }
inline rat rat_max(rat a, rat b) { return a < b ? b : a; }

// Half-open interval [lo, hi) with rational endpoints.
struct interval {
    rat lo, hi;

    interval() = default;
    interval(rat l, rat h) : lo(l), hi(h) {}

    rat length() const { return hi - lo; }
    rat center() const { return (lo + hi) / rat(2); }
    bool empty() const { return hi <= lo; }
    bool contains(const rat& x) const { return lo <= x && x < hi; }
    bool contains(const interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool strictly_contains(const interval& o) const {
        return contains(o) && (lo != o.lo || hi != o.hi);
    }
    bool intersects(const interval& o) const { return lo < o.hi && o.lo < hi; }

    // Dilate about the center by a rational factor.
    interval dilate(const rat& f) const {
        rat c = center(), h = length() / rat(2) * f;
        return interval(c - h, c + h);
    }
    interval left_half() const { return interval(lo, center()); }
    interval right_half() const { return interval(center(), hi); }
    interval reflect() const { return interval(-hi, -lo); }  // {-x : x in I}

    friend bool operator==(const interval& a, const interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const interval& a, const interval& b) { return !(a == b); }

    std::string str() const { return "[" + lo.str() + "," + hi.str() + ")"; }
};

}  // namespace tfa
