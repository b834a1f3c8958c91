#pragma once

#include <cmath>
#include <limits>

namespace normcf {

/// Cheap certified double interval for hot loops. Relies on IEEE-754
/// correctly-rounded +,-,*,/ and pads one ulp outward per operation;
/// library functions (sqrt is correctly rounded, pow is not) get wider pads.
struct DInterval {
    double lo = 0.0;
    double hi = 0.0;

    DInterval() = default;
    DInterval(double v) : lo(v), hi(v) {}
    DInterval(double l, double h) : lo(l), hi(h) {}

    static DInterval whole(double l, double h) { return DInterval(l, h); }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
    bool valid() const { return lo <= hi && std::isfinite(lo) && std::isfinite(hi); }
    int sign() const { return lo > 0.0 ? 1 : (hi < 0.0 ? -1 : 0); }
};

namespace dint {

inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline DInterval add(DInterval a, DInterval b) { return {down(a.lo + b.lo), up(a.hi + b.hi)}; }
inline DInterval sub(DInterval a, DInterval b) { return {down(a.lo - b.hi), up(a.hi - b.lo)}; }
inline DInterval neg(DInterval a) { return {-a.hi, -a.lo}; }

inline DInterval mul(DInterval a, DInterval b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    double lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
    double hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
    return {down(lo), up(hi)};
}

inline DInterval div(DInterval a, DInterval b) {
    if (b.contains_zero()) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
    double lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
    double hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
    return {down(lo), up(hi)};
}

inline DInterval abs(DInterval a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return neg(a);
    return {0.0, std::fmax(-a.lo, a.hi)};
}

inline DInterval sqrt(DInterval a) {
    double lo = a.lo <= 0 ? 0.0 : down(std::sqrt(a.lo));
    double hi = up(std::sqrt(a.hi));
    return {lo, hi};
}

/// x >= 0; pow is not guaranteed correctly rounded, pad 4 ulps.
inline DInterval pow_pos(DInterval a, double p) {
    double lo = a.lo <= 0 ? 0.0 : std::pow(a.lo, p);
    double hi = std::pow(a.hi, p);
    for (int i = 0; i < 4; ++i) {
        lo = down(lo);
        hi = up(hi);
    }
    if (lo < 0) lo = 0;
    return {lo, hi};
}

inline DInterval max(DInterval a, DInterval b) { return {std::fmax(a.lo, b.lo), std::fmax(a.hi, b.hi)}; }
inline DInterval min(DInterval a, DInterval b) { return {std::fmin(a.lo, b.lo), std::fmin(a.hi, b.hi)}; }
inline DInterval hull(DInterval a, DInterval b) { return {std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi)}; }

inline bool lt(DInterval a, DInterval b) { return a.hi < b.lo; }
inline bool leq(DInterval a, DInterval b) { return a.hi <= b.lo; }

}  // namespace dint

}  // namespace normcf
