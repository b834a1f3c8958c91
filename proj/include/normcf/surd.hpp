#pragma once

#include <optional>
#include <string>

#include <gmpxx.h>

#include "normcf/errors.hpp"
#include "normcf/interval.hpp"

namespace normcf {

/// (a + b*sqrt(d)) / c with d squarefree > 1, c > 0, gcd(a,b,c) = 1.
/// b may be 0 transiently; callers demote such values to rationals.
class Surd {
  public:
    Surd() : a_(0), b_(0), c_(1), d_(2) {}
    Surd(mpz_class a, mpz_class b, mpz_class d, mpz_class c)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        if (c_ == 0) throw PreconditionViolated("surd with zero denominator");
        if (d_ <= 1) throw PreconditionViolated("surd radicand must be > 1");
        extract_square_part();
        canonicalize();
    }

    const mpz_class& a() const { return a_; }
    const mpz_class& b() const { return b_; }
    const mpz_class& c() const { return c_; }
    const mpz_class& d() const { return d_; }

    bool is_rational() const { return b_ == 0; }
    mpq_class rational_value() const { return mpq_class(a_, c_); }

    bool same_field(const Surd& o) const { return d_ == o.d_; }

    Surd operator-() const { return raw(-a_, -b_, d_, c_); }

    Surd add_q(const mpq_class& q) const {
        // (a + b sqrt d)/c + p/r = (a r + p c + b r sqrt d) / (c r)
        return raw(a_ * q.get_den() + q.get_num() * c_, b_ * q.get_den(), d_, c_ * q.get_den());
    }
    Surd mul_q(const mpq_class& q) const { return raw(a_ * q.get_num(), b_ * q.get_num(), d_, c_ * q.get_den()); }

    Surd add(const Surd& o) const {
        require_field(o);
        return raw(a_ * o.c_ + o.a_ * c_, b_ * o.c_ + o.b_ * c_, d_, c_ * o.c_);
    }
    Surd sub(const Surd& o) const {
        require_field(o);
        return raw(a_ * o.c_ - o.a_ * c_, b_ * o.c_ - o.b_ * c_, d_, c_ * o.c_);
    }
    Surd mul(const Surd& o) const {
        require_field(o);
        return raw(a_ * o.a_ + b_ * o.b_ * d_, a_ * o.b_ + b_ * o.a_, d_, c_ * o.c_);
    }
    Surd inverse() const {
        // c/(a + b sqrt d) = c (a - b sqrt d) / (a^2 - b^2 d)
        mpz_class n = a_ * a_ - b_ * b_ * d_;
        if (n == 0) throw PreconditionViolated("inverse of zero surd");
        return raw(c_ * a_, -c_ * b_, d_, n);
    }
    Surd div(const Surd& o) const { return mul(o.inverse()); }

    Surd conjugate() const { return raw(a_, -b_, d_, c_); }

    /// Exact sign of the value.
    int sign() const {
        int sa = sgn(a_);
        int sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 with b^2 d
        mpz_class aa = a_ * a_, bb = b_ * b_ * d_;
        int cmp = ::cmp(aa, bb);
        if (cmp == 0) throw PreconditionViolated("surd radicand not squarefree");  // a^2 = b^2 d impossible
        return cmp > 0 ? sa : sb;
    }

    /// Exact compare against a rational.
    int cmp_q(const mpq_class& q) const {
        // sign of (a q_den - q_num c) + b q_den sqrt(d)
        Surd diff = raw(a_ * q.get_den() - q.get_num() * c_, b_ * q.get_den(), d_, c_ * q.get_den());
        return diff.sign();
    }
    int cmp(const Surd& o) const { return sub(o).sign(); }

    bool equals(const Surd& o) const { return d_ == o.d_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_; }

    /// Exact floor of the value.
    mpz_class floor() const {
        // floor(b sqrt d): isqrt(b^2 d) for b >= 0, else -(isqrt)-1 (never exact).
        mpz_class f;
        if (b_ == 0) {
            f = 0;
        } else {
            mpz_class s;
            mpz_class rad = b_ * b_ * d_;
            mpz_sqrt(s.get_mpz_t(), rad.get_mpz_t());
            f = (b_ > 0) ? s : mpz_class(-s - 1);
        }
        mpz_class n = a_ + f;
        mpz_class q;
        // (n + frac)/c with frac in [0,1); frac = 0 only when b = 0
        mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), c_.get_mpz_t());
        return q;
    }

    Interval enclosure(mpfr_prec_t prec) const {
        mpfr_prec_t wp = prec + 16;
        Interval rt = iv::sqrt(Interval::from_mpz(d_, wp), wp);
        Interval num = iv::add(Interval::from_mpz(a_, wp), iv::mul(Interval::from_mpz(b_, wp), rt, wp), wp);
        return iv::div(num, Interval::from_mpz(c_, wp), prec);
    }

    double to_double() const { return enclosure(64).mid_double(); }

    /// Exact square root inside the same field (or of a rational into this
    /// field), when one exists.
    static std::optional<Surd> sqrt_in_field(const Surd& x) {
        if (x.sign() < 0) return std::nullopt;
        // want (e + f sqrt d)^2 = (a + b sqrt d) g^2 / c for g in {c, 2c}
        for (int mult : {1, 2}) {
            mpz_class g = x.c_ * mult;
            // e^2 + f^2 d = a g^2 / c, 2 e f = b g^2 / c  (both integers here)
            mpz_class k = g * g / x.c_;
            mpz_class A = x.a_ * k;  // e^2 + f^2 d
            mpz_class B = x.b_ * k;  // 2 e f
            // e^2 solves t^2 - A t + B^2 d / 4 = 0 -> need disc = A^2 - B^2 d square
            mpz_class disc = A * A - B * B * x.d_;
            if (disc < 0) continue;
            if (mpz_perfect_square_p(disc.get_mpz_t()) == 0) continue;
            mpz_class s;
            mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
            for (int pm : {1, -1}) {
                mpz_class e2_times2 = A + pm * s;  // 2 e^2
                if (e2_times2 < 0 || mpz_odd_p(e2_times2.get_mpz_t())) continue;
                mpz_class e2 = e2_times2 / 2;
                if (mpz_perfect_square_p(e2.get_mpz_t()) == 0) continue;
                mpz_class e;
                mpz_sqrt(e.get_mpz_t(), e2.get_mpz_t());
                for (int se : {1, -1}) {
                    mpz_class ee = se * e;
                    mpz_class f;
                    if (ee == 0) {
                        if (B != 0) continue;
                        // pure f sqrt(d) root: f^2 d = A
                        if (A % x.d_ != 0) continue;
                        mpz_class f2 = A / x.d_;
                        if (mpz_perfect_square_p(f2.get_mpz_t()) == 0) continue;
                        mpz_sqrt(f.get_mpz_t(), f2.get_mpz_t());
                    } else {
                        if (B % (2 * ee) != 0) continue;
                        f = B / (2 * ee);
                        if (ee * ee + f * f * x.d_ != A) continue;
                    }
                    Surd y = raw(ee, f, x.d_, g);
                    if (y.sign() >= 0 && y.mul(y).equals(x)) return y;
                }
            }
        }
        return std::nullopt;
    }

    std::string str() const {
        std::string s = "(";
        s += a_.get_str();
        if (b_ >= 0) s += "+";
        s += b_.get_str();
        s += "√";
        s += d_.get_str();
        s += ")/";
        s += c_.get_str();
        return s;
    }

    /// Canonical key for hashing/period detection.
    std::string key() const { return a_.get_str() + "|" + b_.get_str() + "|" + c_.get_str() + "|" + d_.get_str(); }

    static Surd raw(mpz_class a, mpz_class b, mpz_class d, mpz_class c) {
        Surd s;
        s.a_ = std::move(a);
        s.b_ = std::move(b);
        s.c_ = std::move(c);
        s.d_ = std::move(d);
        s.canonicalize();
        return s;
    }

  private:
    void require_field(const Surd& o) const {
        if (d_ != o.d_) throw PreconditionViolated("surd field mismatch");
    }

    void canonicalize() {
        if (c_ < 0) {
            a_ = -a_;
            b_ = -b_;
            c_ = -c_;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c_.get_mpz_t());
        if (g > 1) {
            a_ /= g;
            b_ /= g;
            c_ /= g;
        }
    }

    // Pull square factors of d into b (trial division; d values here are small).
    // Larger undetected square factors only cost canonicity, not correctness:
    // the perfect-square rejection below is what sign() and floor() rely on.
    void extract_square_part() {
        mpz_class d = d_;
        mpz_class sq = 1;
        for (unsigned long p = 2; p <= 1024 && mpz_class(p) * p <= d; ++p) {
            mpz_class pp = mpz_class(p) * p;
            while (d % pp == 0) {
                d /= pp;
                sq *= p;
            }
        }
        if (mpz_perfect_square_p(d.get_mpz_t())) {
            mpz_class r;
            mpz_sqrt(r.get_mpz_t(), d.get_mpz_t());
            sq *= r;
            d = 1;
        }
        if (d == 1) throw PreconditionViolated("surd radicand is a perfect square");
        d_ = d;
        b_ *= sq;
    }

    mpz_class a_, b_, c_, d_;
};

}  // namespace normcf
