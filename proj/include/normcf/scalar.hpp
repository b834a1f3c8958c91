#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include <gmpxx.h>

#include "normcf/errors.hpp"
#include "normcf/interval.hpp"
#include "normcf/surd.hpp"

namespace normcf {

enum class Ordering { Less, Equal, Greater, Ambiguous };

/// Tagged exact value (rational or quadratic surd) or adaptive-precision
/// interval. Arithmetic stays exact inside a field and degrades to a
/// guaranteed enclosure otherwise; degraded values keep a generator so they
/// can be re-evaluated at higher precision.
class Scalar {
  public:
    using Generator = std::function<Interval(mpfr_prec_t)>;

    struct Approx {
        Interval box;
        std::shared_ptr<const Generator> gen;  // may be null (non-refinable)
    };

    Scalar() : v_(mpq_class(0)) {}
    Scalar(long n) : v_(mpq_class(n)) {}
    Scalar(mpq_class q) : v_(std::move(q)) { std::get<mpq_class>(v_).canonicalize(); }
    Scalar(mpz_class z) : v_(mpq_class(std::move(z))) {}
    Scalar(Surd s) {
        if (s.is_rational())
            v_ = s.rational_value();
        else
            v_ = std::move(s);
    }
    static Scalar ratio(mpz_class num, mpz_class den) {
        mpq_class q(std::move(num), std::move(den));
        q.canonicalize();
        return Scalar(std::move(q));
    }
    static Scalar approx(Interval box, Generator gen = nullptr) {
        Scalar s;
        Approx a;
        a.box = std::move(box);
        if (gen) a.gen = std::make_shared<const Generator>(std::move(gen));
        s.v_ = std::move(a);
        return s;
    }
    static Scalar sqrt2() { return Scalar(Surd::raw(0, 1, 2, 1)); }

    bool is_exact() const { return !std::holds_alternative<Approx>(v_); }
    bool is_rational() const { return std::holds_alternative<mpq_class>(v_); }
    bool is_surd() const { return std::holds_alternative<Surd>(v_); }
    const mpq_class& rational() const { return std::get<mpq_class>(v_); }
    const Surd& surd() const { return std::get<Surd>(v_); }
    const Approx& approx_val() const { return std::get<Approx>(v_); }

    bool is_exact_zero() const { return is_rational() && rational() == 0; }

    Interval enclosure(mpfr_prec_t prec) const {
        prec = clamp_prec(prec);
        if (is_rational()) return Interval::from_mpq(rational(), prec);
        if (is_surd()) return surd().enclosure(prec);
        const Approx& a = approx_val();
        if (a.gen && !a.box.width_leq_2exp(-(long)prec + 8)) return (*a.gen)(prec);
        return a.box;
    }

    double to_double() const { return enclosure(64).mid_double(); }

    /// Exact sign when decidable, throws AmbiguousError otherwise.
    int sign(long max_bits = -1) const {
        if (is_rational()) return sgn(rational());
        if (is_surd()) return surd().sign();
        if (max_bits < 0) max_bits = precision_cap().load();
        for (long p = 64; p <= max_bits; p *= 2) {
            Interval e = enclosure(p);
            if (e.definitely_positive()) return 1;
            if (e.definitely_negative()) return -1;
            if (e.is_exact_zero()) return 0;
            if (!approx_val().gen) break;
        }
        throw AmbiguousError("sign undecidable at precision cap");
    }

    Scalar operator-() const {
        if (is_rational()) return Scalar(mpq_class(-rational()));
        if (is_surd()) return Scalar(-surd());
        Scalar self = *this;
        return approx(iv::neg(approx_val().box),
                      [self](mpfr_prec_t p) { return iv::neg(self.enclosure(p)); });
    }

    Scalar abs() const {
        if (is_rational()) return Scalar(mpq_class(::abs(rational())));
        if (is_surd()) return surd().sign() >= 0 ? *this : -*this;
        Scalar self = *this;
        return approx(iv::abs(approx_val().box),
                      [self](mpfr_prec_t p) { return iv::abs(self.enclosure(p)); });
    }

    friend Scalar operator+(const Scalar& x, const Scalar& y) { return binop(x, y, Op::Add); }
    friend Scalar operator-(const Scalar& x, const Scalar& y) { return binop(x, y, Op::Sub); }
    friend Scalar operator*(const Scalar& x, const Scalar& y) { return binop(x, y, Op::Mul); }
    friend Scalar operator/(const Scalar& x, const Scalar& y) { return binop(x, y, Op::Div); }

    Scalar inverse() const { return Scalar(1) / *this; }

    /// Integer power (k >= 0).
    Scalar pow_int(unsigned long k) const {
        Scalar r(1);
        Scalar base = *this;
        while (k) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    /// Exact square root when one exists in the value's field, else a
    /// refinable enclosure. Requires x >= 0.
    Scalar sqrt() const {
        if (is_rational()) {
            const mpq_class& q = rational();
            if (q < 0) throw PreconditionViolated("sqrt of negative rational");
            if (q == 0) return Scalar(0);
            if (mpz_perfect_square_p(q.get_num().get_mpz_t()) && mpz_perfect_square_p(q.get_den().get_mpz_t())) {
                mpz_class n, d;
                mpz_sqrt(n.get_mpz_t(), q.get_num().get_mpz_t());
                mpz_sqrt(d.get_mpz_t(), q.get_den().get_mpz_t());
                return ratio(n, d);
            }
            // sqrt(n/d) = sqrt(n d)/d as a surd, for radicands small enough to
            // canonicalize cheaply
            mpz_class nd = q.get_num() * q.get_den();
            if (mpz_sizeinbase(nd.get_mpz_t(), 2) <= 48) {
                try {
                    return Scalar(Surd(0, 1, nd, q.get_den()));
                } catch (const PreconditionViolated&) {
                    // radicand collapsed, fall through to interval
                }
            }
        }
        if (is_surd()) {
            if (auto r = Surd::sqrt_in_field(surd())) return Scalar(*r);
        }
        Scalar self = *this;
        return approx(iv::sqrt(enclosure(128), 128),
                      [self](mpfr_prec_t p) { return iv::sqrt(self.enclosure(p + 8), p); });
    }

    /// Exact floor when decidable; throws AmbiguousError otherwise.
    mpz_class floor(long max_bits = -1) const {
        if (is_rational()) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), rational().get_num().get_mpz_t(), rational().get_den().get_mpz_t());
            return q;
        }
        if (is_surd()) return surd().floor();
        if (max_bits < 0) max_bits = precision_cap().load();
        for (long p = 64; p <= max_bits; p *= 2) {
            Interval e = enclosure(p);
            mpz_class flo, fhi;
            mpfr_t f;
            mpfr_init2(f, mpfr_get_prec(e.lo()) + 4);
            mpfr_floor(f, e.lo());
            mpfr_get_z(flo.get_mpz_t(), f, MPFR_RNDD);
            mpfr_floor(f, e.hi());
            mpfr_get_z(fhi.get_mpz_t(), f, MPFR_RNDD);
            mpfr_clear(f);
            if (flo == fhi) return flo;
            if (!approx_val().gen) break;
        }
        throw AmbiguousError("floor undecidable at precision cap");
    }

    std::string str() const;

  private:
    enum class Op { Add, Sub, Mul, Div };

    static Scalar binop(const Scalar& x, const Scalar& y, Op op) {
        // exact x exact
        if (x.is_rational() && y.is_rational()) {
            const mpq_class &a = x.rational(), &b = y.rational();
            switch (op) {
                case Op::Add: return Scalar(mpq_class(a + b));
                case Op::Sub: return Scalar(mpq_class(a - b));
                case Op::Mul: return Scalar(mpq_class(a * b));
                case Op::Div:
                    if (b == 0) throw PreconditionViolated("division by zero");
                    return Scalar(mpq_class(a / b));
            }
        }
        if (x.is_exact() && y.is_exact() && (!x.is_surd() || !y.is_surd() || x.surd().same_field(y.surd()))) {
            Surd a = x.is_surd() ? x.surd() : lift(x.rational(), y.surd().d());
            Surd b = y.is_surd() ? y.surd() : lift(y.rational(), x.surd().d());
            switch (op) {
                case Op::Add: return Scalar(a.add(b));
                case Op::Sub: return Scalar(a.sub(b));
                case Op::Mul: return Scalar(a.mul(b));
                case Op::Div: return Scalar(a.div(b));
            }
        }
        // at least one side approximate (or incompatible fields)
        Scalar xs = x, ys = y;
        auto f = [xs, ys, op](mpfr_prec_t p) {
            Interval a = xs.enclosure(p + 8), b = ys.enclosure(p + 8);
            switch (op) {
                case Op::Add: return iv::add(a, b, p);
                case Op::Sub: return iv::sub(a, b, p);
                case Op::Mul: return iv::mul(a, b, p);
                default: return iv::div(a, b, p);
            }
        };
        return approx(f(128), f);
    }

    static Surd lift(const mpq_class& q, const mpz_class& d) {
        return Surd::raw(q.get_num(), 0, d, q.get_den());
    }

    std::variant<mpq_class, Surd, Approx> v_;
};

/// Decide the order of two scalars, refining up to max_bits. Equal is
/// returned only for provable exact equality.
inline Ordering compare(const Scalar& x, const Scalar& y, long max_bits = -1) {
    if (max_bits < 0) max_bits = precision_cap().load();
    if (x.is_exact() && y.is_exact()) {
        if (x.is_rational() && y.is_rational()) {
            int c = cmp(x.rational(), y.rational());
            return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
        }
        if (x.is_surd() && y.is_rational()) {
            int c = x.surd().cmp_q(y.rational());
            return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
        }
        if (x.is_rational() && y.is_surd()) {
            int c = y.surd().cmp_q(x.rational());
            return c > 0 ? Ordering::Less : (c < 0 ? Ordering::Greater : Ordering::Equal);
        }
        if (x.surd().same_field(y.surd())) {
            int c = x.surd().cmp(y.surd());
            return c < 0 ? Ordering::Less : (c > 0 ? Ordering::Greater : Ordering::Equal);
        }
        // distinct quadratic fields: values can only coincide if rational,
        // which canonicalization excludes, so refinement terminates
    }
    for (long p = 64;; p *= 2) {
        if (p > max_bits) p = max_bits;
        Interval a = x.enclosure(p), b = y.enclosure(p);
        if (iv::lt(a, b)) return Ordering::Less;
        if (iv::lt(b, a)) return Ordering::Greater;
        if (p >= max_bits) return Ordering::Ambiguous;
    }
}

inline bool definitely_less(const Scalar& x, const Scalar& y, long max_bits = -1) {
    return compare(x, y, max_bits) == Ordering::Less;
}

/// Enclosure of x with hi - lo <= 2^width_exp.
inline Interval refine(const Scalar& x, long width_exp, long max_bits = -1) {
    if (max_bits < 0) max_bits = precision_cap().load();
    for (long p = std::max(64L, -width_exp + 16);; p *= 2) {
        if (p > max_bits) p = max_bits;
        Interval e = x.enclosure(p);
        if (e.width_leq_2exp(width_exp)) return e;
        if (p >= max_bits || (!x.is_exact() && !x.approx_val().gen))
            throw PrecisionExhausted("refine: cannot reach requested width under the precision cap");
    }
}

/// Certified enclosure of x^(1/p) with the requested width. p >= 1 may be a
/// rational scalar; non-rational p goes through exp/log enclosures.
inline Interval root_pth(const Scalar& x, const Scalar& p, long width_exp, long max_bits = -1) {
    if (x.sign() < 0) throw PreconditionViolated("root_pth of negative value");
    if (x.is_exact_zero()) return Interval::from_si(0, 64);
    if (max_bits < 0) max_bits = precision_cap().load();
    for (long wp = std::max(64L, -width_exp + 16);; wp *= 2) {
        if (wp > max_bits) wp = max_bits;
        Interval xe = x.enclosure(wp);
        Interval r;
        if (p.is_rational()) {
            const mpq_class& q = p.rational();
            // x^(den/num)
            if (!mpz_fits_ulong_p(q.get_num().get_mpz_t()) || !mpz_fits_ulong_p(q.get_den().get_mpz_t()))
                throw PreconditionViolated("root exponent too large");
            r = iv::pow_q(xe, q.get_den().get_ui(), q.get_num().get_ui(), wp);
        } else {
            Interval pe = p.enclosure(wp);
            r = iv::exp(iv::div(iv::log(xe, wp), pe, wp), wp);
        }
        if (r.width_leq_2exp(width_exp)) return r;
        if (wp >= max_bits) throw PrecisionExhausted("root_pth: precision cap reached");
    }
}

/// max/min that stay exact when the order is decidable and fall back to a
/// sound hull otherwise.
inline Scalar scalar_max(const Scalar& x, const Scalar& y) {
    switch (compare(x, y)) {
        case Ordering::Less: return y;
        case Ordering::Equal: return x;
        case Ordering::Greater: return x;
        default: break;
    }
    Scalar a = x, b = y;
    return Scalar::approx(iv::max(a.enclosure(128), b.enclosure(128)),
                          [a, b](mpfr_prec_t p) { return iv::max(a.enclosure(p), b.enclosure(p)); });
}

inline Scalar scalar_min(const Scalar& x, const Scalar& y) {
    switch (compare(x, y)) {
        case Ordering::Less: return x;
        case Ordering::Equal: return x;
        case Ordering::Greater: return y;
        default: break;
    }
    Scalar a = x, b = y;
    return Scalar::approx(iv::min(a.enclosure(128), b.enclosure(128)),
                          [a, b](mpfr_prec_t p) { return iv::min(a.enclosure(p), b.enclosure(p)); });
}

/// "<decimal>~<width-exponent>" enclosure format used by all emitters.
inline std::string enclosure_str(const Interval& e) {
    long we = e.width_exp();
    long dec = we >= 0 ? 1 : std::min<long>(40, (-we) * 301 / 1000 + 1);
    mpfr_t mid;
    mpfr_init2(mid, std::max<mpfr_prec_t>(e.prec(), 64));
    mpfr_add(mid, e.lo(), e.hi(), MPFR_RNDN);
    mpfr_div_ui(mid, mid, 2, MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rf", static_cast<int>(dec), mid);
    std::string out(s);
    mpfr_free_str(s);
    mpfr_clear(mid);
    out += "~";
    out += std::to_string(we);
    return out;
}

inline std::string Scalar::str() const {
    if (is_rational()) {
        const mpq_class& q = rational();
        if (q.get_den() == 1) return q.get_num().get_str();
        return q.get_num().get_str() + "/" + q.get_den().get_str();
    }
    if (is_surd()) return surd().str();
    return enclosure_str(enclosure(96));
}

}  // namespace normcf
