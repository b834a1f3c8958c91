#pragma once

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "normcf/errors.hpp"

namespace normcf {

/// Global precision cap in bits. Comparisons that would need more return
/// Ambiguous instead of guessing. Overridable via NORMCF_PRECISION_CAP.
inline std::atomic<long>& precision_cap() {
    static std::atomic<long> cap{[] {
        if (const char* s = std::getenv("NORMCF_PRECISION_CAP")) {
            long v = std::atol(s);
            if (v >= 16) return v;
        }
        return 4096L;
    }()};
    return cap;
}

inline mpfr_prec_t clamp_prec(long p) {
    long cap = precision_cap().load();
    return static_cast<mpfr_prec_t>(std::max(16L, std::min(p, cap)));
}

/// Closed interval with dyadic (MPFR) endpoints. Every operation returns an
/// interval containing the exact image of its operands.
class Interval {
  public:
    Interval() {
        mpfr_init2(lo_, 16);
        mpfr_init2(hi_, 16);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    explicit Interval(long v) : Interval() { set_si(v); }
    Interval(const Interval& o) {
        mpfr_init2(lo_, mpfr_get_prec(o.lo_));
        mpfr_init2(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    Interval(Interval&& o) noexcept {
        mpfr_init2(lo_, 16);
        mpfr_init2(hi_, 16);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    Interval& operator=(const Interval& o) {
        if (this != &o) {
            mpfr_set_prec(lo_, mpfr_get_prec(o.lo_));
            mpfr_set_prec(hi_, mpfr_get_prec(o.hi_));
            mpfr_set(lo_, o.lo_, MPFR_RNDD);
            mpfr_set(hi_, o.hi_, MPFR_RNDU);
        }
        return *this;
    }
    Interval& operator=(Interval&& o) noexcept {
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Interval from_si(long v, mpfr_prec_t prec = 64) {
        Interval r;
        r.resize(prec);
        r.set_si(v);
        return r;
    }
    static Interval from_mpz(const mpz_class& z, mpfr_prec_t prec) {
        Interval r;
        r.resize(prec);
        mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
        return r;
    }
    static Interval from_mpq(const mpq_class& q, mpfr_prec_t prec) {
        Interval r;
        r.resize(prec);
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static Interval from_double(double d, mpfr_prec_t prec = 64) {
        Interval r;
        r.resize(prec);
        mpfr_set_d(r.lo_, d, MPFR_RNDD);
        mpfr_set_d(r.hi_, d, MPFR_RNDU);
        return r;
    }
    static Interval from_endpoints(const Interval& lo, const Interval& hi) {
        Interval r;
        r.resize(std::max(lo.prec(), hi.prec()));
        mpfr_set(r.lo_, lo.lo_, MPFR_RNDD);
        mpfr_set(r.hi_, hi.hi_, MPFR_RNDU);
        return r;
    }

    mpfr_prec_t prec() const { return std::max(mpfr_get_prec(lo_), mpfr_get_prec(hi_)); }

    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }
    mpfr_t& lo_mut() { return lo_; }
    mpfr_t& hi_mut() { return hi_; }

    double mid_double() const {
        double a = mpfr_get_d(lo_, MPFR_RNDN);
        double b = mpfr_get_d(hi_, MPFR_RNDN);
        return 0.5 * (a + b);
    }
    double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

    /// Exponent e with hi - lo <= 2^e, or the most negative value for a point.
    long width_exp() const {
        mpfr_t w;
        mpfr_init2(w, 64);
        mpfr_sub(w, hi_, lo_, MPFR_RNDU);
        long e;
        if (mpfr_zero_p(w))
            e = mpfr_get_emin();
        else
            e = static_cast<long>(mpfr_get_exp(w));
        mpfr_clear(w);
        return e;
    }

    bool width_leq_2exp(long e) const {
        mpfr_t w;
        mpfr_init2(w, 64);
        mpfr_sub(w, hi_, lo_, MPFR_RNDU);
        bool ok = mpfr_zero_p(w) || mpfr_get_exp(w) <= e;
        mpfr_clear(w);
        return ok;
    }

    bool is_point() const { return mpfr_equal_p(lo_, hi_); }
    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    /// -1, 0 (straddles or is zero), +1
    int sign() const {
        if (mpfr_sgn(lo_) > 0) return 1;
        if (mpfr_sgn(hi_) < 0) return -1;
        return 0;
    }
    bool definitely_positive() const { return mpfr_sgn(lo_) > 0; }
    bool definitely_negative() const { return mpfr_sgn(hi_) < 0; }
    bool is_exact_zero() const { return mpfr_zero_p(lo_) && mpfr_zero_p(hi_); }

    void set_si(long v) {
        mpfr_set_si(lo_, v, MPFR_RNDD);
        mpfr_set_si(hi_, v, MPFR_RNDU);
    }
    void resize(mpfr_prec_t prec) {
        mpfr_prec_round(lo_, prec, MPFR_RNDD);
        mpfr_prec_round(hi_, prec, MPFR_RNDU);
    }

  private:
    mpfr_t lo_;
    mpfr_t hi_;
};

namespace iv {

inline Interval make(mpfr_prec_t prec) {
    Interval r;
    r.resize(prec);
    return r;
}

inline Interval add(const Interval& a, const Interval& b, mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_add(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_add(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

inline Interval sub(const Interval& a, const Interval& b, mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_sub(r.lo_mut(), a.lo(), b.hi(), MPFR_RNDD);
    mpfr_sub(r.hi_mut(), a.hi(), b.lo(), MPFR_RNDU);
    return r;
}

inline Interval neg(const Interval& a) {
    Interval r = make(a.prec());
    mpfr_neg(r.lo_mut(), a.hi(), MPFR_RNDD);
    mpfr_neg(r.hi_mut(), a.lo(), MPFR_RNDU);
    return r;
}

inline Interval mul(const Interval& a, const Interval& b, mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    // lo = min over corner products rounded down, hi = max rounded up
    mpfr_mul(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);

    mpfr_mul(r.hi_mut(), a.lo(), b.lo(), MPFR_RNDU);
    mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

inline Interval div(const Interval& a, const Interval& b, mpfr_prec_t prec) {
    if (b.contains_zero()) throw PrecisionExhausted("interval division by an interval containing 0");
    Interval r = make(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_div(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_div(t, a.lo(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_div(t, a.hi(), b.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_div(t, a.hi(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);

    mpfr_div(r.hi_mut(), a.lo(), b.lo(), MPFR_RNDU);
    mpfr_div(t, a.lo(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_div(t, a.hi(), b.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_div(t, a.hi(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

inline Interval abs(const Interval& a) {
    Interval r = make(a.prec());
    if (mpfr_sgn(a.lo()) >= 0) return a;
    if (mpfr_sgn(a.hi()) <= 0) return neg(a);
    // straddles zero
    mpfr_set_zero(r.lo_mut(), 1);
    mpfr_neg(r.hi_mut(), a.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

inline Interval hull(const Interval& a, const Interval& b) {
    Interval r = make(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_max(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

inline Interval max(const Interval& a, const Interval& b) {
    Interval r = make(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_max(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

inline Interval min(const Interval& a, const Interval& b) {
    Interval r = make(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_min(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

/// x^k for x >= 0 (callers take abs first).
inline Interval pow_ui(const Interval& a, unsigned long k, mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_pow_ui(r.lo_mut(), a.lo(), k, MPFR_RNDD);
    mpfr_pow_ui(r.hi_mut(), a.hi(), k, MPFR_RNDU);
    return r;
}

inline Interval sqrt(const Interval& a, mpfr_prec_t prec) {
    if (mpfr_sgn(a.hi()) < 0) throw PrecisionExhausted("sqrt of negative interval");
    Interval r = make(prec);
    if (mpfr_sgn(a.lo()) < 0)
        mpfr_set_zero(r.lo_mut(), 1);
    else
        mpfr_sqrt(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_sqrt(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

/// k-th root, x >= 0.
inline Interval rootn(const Interval& a, unsigned long k, mpfr_prec_t prec) {
    if (mpfr_sgn(a.hi()) < 0) throw PrecisionExhausted("rootn of negative interval");
    Interval r = make(prec);
    if (mpfr_sgn(a.lo()) < 0)
        mpfr_set_zero(r.lo_mut(), 1);
    else
        mpfr_rootn_ui(r.lo_mut(), a.lo(), k, MPFR_RNDD);
    mpfr_rootn_ui(r.hi_mut(), a.hi(), k, MPFR_RNDU);
    return r;
}

/// x^(num/den) for x >= 0, num >= 0, den >= 1.
inline Interval pow_q(const Interval& a, unsigned long num, unsigned long den, mpfr_prec_t prec) {
    if (num == 0) return Interval::from_si(1, prec);
    if (den == 1) return pow_ui(a, num, prec);
    Interval base = rootn(a, den, prec + 8);
    return pow_ui(base, num, prec);
}

inline Interval log(const Interval& a, mpfr_prec_t prec) {
    if (mpfr_sgn(a.lo()) <= 0) throw PrecisionExhausted("log of non-positive interval");
    Interval r = make(prec);
    mpfr_log(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_log(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

inline Interval exp(const Interval& a, mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_exp(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_exp(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

inline Interval const_pi(mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_const_pi(r.lo_mut(), MPFR_RNDD);
    mpfr_const_pi(r.hi_mut(), MPFR_RNDU);
    return r;
}

inline Interval const_ln2(mpfr_prec_t prec) {
    Interval r = make(prec);
    mpfr_const_log2(r.lo_mut(), MPFR_RNDD);
    mpfr_const_log2(r.hi_mut(), MPFR_RNDU);
    return r;
}

/// sin on arguments within [-eps, pi/2 + eps]; wider arguments get the [-1,1] hull.
inline Interval sin(const Interval& a, mpfr_prec_t prec) {
    Interval r = make(prec);
    Interval half_pi = div(const_pi(prec + 8), Interval::from_si(2, 16), prec + 8);
    if (mpfr_sgn(a.lo()) >= 0 && mpfr_lessequal_p(a.hi(), half_pi.lo())) {
        mpfr_sin(r.lo_mut(), a.lo(), MPFR_RNDD);
        mpfr_sin(r.hi_mut(), a.hi(), MPFR_RNDU);
        return r;
    }
    mpfr_set_si(r.lo_mut(), -1, MPFR_RNDD);
    mpfr_set_si(r.hi_mut(), 1, MPFR_RNDU);
    // tighten when the whole interval sits in [0, pi]
    if (mpfr_sgn(a.lo()) >= 0 && mpfr_lessequal_p(a.hi(), const_pi(prec + 8).lo())) {
        mpfr_t s1, s2;
        mpfr_init2(s1, prec);
        mpfr_init2(s2, prec);
        mpfr_sin(s1, a.lo(), MPFR_RNDD);
        mpfr_sin(s2, a.hi(), MPFR_RNDD);
        mpfr_min(r.lo_mut(), s1, s2, MPFR_RNDD);
        mpfr_clear(s1);
        mpfr_clear(s2);
    }
    return r;
}

inline Interval cos(const Interval& a, mpfr_prec_t prec) {
    Interval r = make(prec);
    Interval pi_enc = const_pi(prec + 8);
    if (mpfr_sgn(a.lo()) >= 0 && mpfr_lessequal_p(a.hi(), pi_enc.lo())) {
        // decreasing on [0, pi]
        mpfr_cos(r.lo_mut(), a.hi(), MPFR_RNDD);
        mpfr_cos(r.hi_mut(), a.lo(), MPFR_RNDU);
        return r;
    }
    mpfr_set_si(r.lo_mut(), -1, MPFR_RNDD);
    mpfr_set_si(r.hi_mut(), 1, MPFR_RNDU);
    return r;
}

/// a < b certainly
inline bool lt(const Interval& a, const Interval& b) { return mpfr_less_p(a.hi(), b.lo()); }
/// a <= b certainly
inline bool leq(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.hi(), b.lo()); }
inline bool disjoint(const Interval& a, const Interval& b) { return lt(a, b) || lt(b, a); }

}  // namespace iv

}  // namespace normcf
