#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "normcf/errors.hpp"
#include "normcf/scalar.hpp"

namespace normcf {

struct Point {
    Scalar x, y;
};

struct PNormTag {
    std::optional<mpq_class> p;  // nullopt = sup norm
    bool is_inf() const { return !p.has_value(); }
};
struct Oct1Tag {};
struct Oct2Tag {};
struct ComposedTag;

class NormSpec {
  public:
    using Variant = std::variant<PNormTag, Oct1Tag, Oct2Tag, std::shared_ptr<const ComposedTag>>;

    static NormSpec pnorm(mpq_class p);
    static NormSpec pnorm_inf() { return NormSpec(PNormTag{std::nullopt}); }
    static NormSpec oct1() { return NormSpec(Oct1Tag{}); }
    static NormSpec oct2() { return NormSpec(Oct2Tag{}); }

    const Variant& v() const { return v_; }
    bool is_pnorm() const { return std::holds_alternative<PNormTag>(v_); }
    bool is_inf() const { return is_pnorm() && std::get<PNormTag>(v_).is_inf(); }
    bool is_oct1() const { return std::holds_alternative<Oct1Tag>(v_); }
    bool is_oct2() const { return std::holds_alternative<Oct2Tag>(v_); }
    bool is_composed() const { return std::holds_alternative<std::shared_ptr<const ComposedTag>>(v_); }
    const PNormTag& pnorm_tag() const { return std::get<PNormTag>(v_); }
    const ComposedTag& composed() const { return *std::get<std::shared_ptr<const ComposedTag>>(v_); }

    explicit NormSpec(Variant v) : v_(std::move(v)) {}

  private:
    Variant v_;
};

struct ComposedTag {
    NormSpec outer, left, right;
    Scalar left_scale;  // applied to the left norm's value before composing
    Scalar norm_scale;  // divides the composite so that F(1,0)=F(0,1)=1
};

inline NormSpec NormSpec::pnorm(mpq_class p) {
    if (p < 1) throw SpecParseError("p-norm requires p >= 1");
    return NormSpec(PNormTag{std::move(p)});
}

struct StretchFactor {
    Scalar t;
};

namespace detail {

inline Scalar sqrt2_scalar() { return Scalar(Surd::raw(0, 1, 2, 1)); }
inline Scalar half_sqrt2() { return Scalar(Surd::raw(0, 1, 2, 2)); }
inline Scalar sqrt2_minus1() { return Scalar(Surd::raw(-1, 1, 2, 1)); }

/// x^(num/den) for x >= 0, staying exact when possible. Exactness is only
/// attempted while the power stays within a size budget; beyond it the value
/// degrades to a refinable enclosure.
inline Scalar scalar_pow_q(const Scalar& x, unsigned long num, unsigned long den) {
    if (num == 0) return Scalar(1);
    size_t opbits = 64;
    if (x.is_rational())
        opbits = mpz_sizeinbase(x.rational().get_num().get_mpz_t(), 2) +
                 mpz_sizeinbase(x.rational().get_den().get_mpz_t(), 2);
    if (!x.is_exact() || num > 64 || opbits * num > 8192) {
        Scalar xc = x;
        return Scalar::approx(iv::pow_q(xc.enclosure(136), num, den, 128), [xc, num, den](mpfr_prec_t p) {
            return iv::pow_q(xc.enclosure(p + 8), num, den, p);
        });
    }
    Scalar z = x.pow_int(num);
    if (den == 1) return z;
    if (den == 2) return z.sqrt();
    if (z.is_rational()) {
        const mpq_class& q = z.rational();
        if (q >= 0) {
            mpz_class rn, rd;
            bool en = mpz_root(rn.get_mpz_t(), q.get_num().get_mpz_t(), den) != 0;
            bool ed = mpz_root(rd.get_mpz_t(), q.get_den().get_mpz_t(), den) != 0;
            if (en && ed) return Scalar::ratio(rn, rd);
        }
    }
    Scalar zc = z;
    return Scalar::approx(iv::rootn(zc.enclosure(128), den, 128),
                          [zc, den](mpfr_prec_t p) { return iv::rootn(zc.enclosure(p + 8), den, p); });
}

}  // namespace detail

/// Supporting functionals c|x| + d|y| for the piecewise-linear norms.
inline std::optional<std::vector<std::pair<Scalar, Scalar>>> polytope_functionals(const NormSpec& F) {
    using V = std::vector<std::pair<Scalar, Scalar>>;
    if (F.is_pnorm()) {
        const auto& t = F.pnorm_tag();
        if (t.is_inf()) return V{{Scalar(1), Scalar(0)}, {Scalar(0), Scalar(1)}};
        if (*t.p == 1) return V{{Scalar(1), Scalar(1)}};
        return std::nullopt;
    }
    if (F.is_oct1())
        return V{{Scalar(1), Scalar(0)},
                 {Scalar(0), Scalar(1)},
                 {detail::half_sqrt2(), detail::half_sqrt2()}};
    if (F.is_oct2())
        return V{{Scalar(1), detail::sqrt2_minus1()}, {detail::sqrt2_minus1(), Scalar(1)}};
    return std::nullopt;
}

inline Scalar eval(const NormSpec& F, const Point& P);

namespace detail {

inline Scalar eval_abs(const NormSpec& F, const Scalar& X, const Scalar& Y) {
    if (F.is_pnorm()) {
        const auto& t = F.pnorm_tag();
        if (t.is_inf()) return scalar_max(X, Y);
        const mpq_class& p = *t.p;
        if (p == 1) return X + Y;
        if (X.is_exact_zero()) return Y;
        if (Y.is_exact_zero()) return X;
        unsigned long num = p.get_num().get_ui(), den = p.get_den().get_ui();
        Scalar s = scalar_pow_q(X, num, den) + scalar_pow_q(Y, num, den);
        return scalar_pow_q(s, den, num);
    }
    if (F.is_oct1()) return scalar_max(scalar_max(X, Y), (X + Y) * half_sqrt2());
    if (F.is_oct2()) return scalar_max(X + sqrt2_minus1() * Y, sqrt2_minus1() * X + Y);
    const ComposedTag& c = F.composed();
    Scalar f = c.left_scale * eval(c.left, Point{X, Y});
    Scalar g = eval(c.right, Point{X, Y});
    return eval(c.outer, Point{f, g}) / c.norm_scale;
}

}  // namespace detail

inline Scalar eval(const NormSpec& F, const Point& P) {
    return detail::eval_abs(F, P.x.abs(), P.y.abs());
}

/// F_t(P) = F(x/t, y t).
inline Scalar eval_stretched(const NormSpec& F, const StretchFactor& t, const Point& P) {
    return eval(F, Point{P.x / t.t, P.y * t.t});
}

/// t * F_t(x, y) = F(x, y s) with s = t^2; all stretched comparisons go
/// through this form so s can stay exact.
inline Scalar eval_weighted(const NormSpec& F, const Scalar& X, const Scalar& Y, const Scalar& s) {
    return detail::eval_abs(F, X, Y * s);
}

namespace detail {

/// Exact crossing of the two piecewise-linear functions
/// max_i(c_i X + d_i Y s) and max_j(c_j X' + d_j Y' s) over s > 0.
inline std::optional<Scalar> polytope_equalize_s(const std::vector<std::pair<Scalar, Scalar>>& fns,
                                                 const Scalar& X, const Scalar& Y, const Scalar& Xp,
                                                 const Scalar& Yp) {
    auto side = [&](const Scalar& s, const Scalar& A, const Scalar& B) {
        Scalar best = fns[0].first * A + fns[0].second * B * s;
        for (size_t i = 1; i < fns.size(); ++i) best = scalar_max(best, fns[i].first * A + fns[i].second * B * s);
        return best;
    };
    std::vector<Scalar> valid;
    for (const auto& fi : fns) {
        for (const auto& fj : fns) {
            Scalar den = fi.second * Y - fj.second * Yp;
            if (den.is_exact() && den.sign() == 0) continue;
            Scalar s = (fj.first * Xp - fi.first * X) / den;
            if (!(s.is_exact() ? s.sign() > 0 : false)) continue;
            Scalar L = side(s, X, Y), R = side(s, Xp, Yp);
            Scalar li = fi.first * X + fi.second * Y * s;
            Scalar rj = fj.first * Xp + fj.second * Yp * s;
            if (compare(L, li) != Ordering::Equal) continue;
            if (compare(R, rj) != Ordering::Equal) continue;
            if (compare(L, R) != Ordering::Equal) continue;
            bool dup = false;
            for (const auto& v : valid)
                if (compare(v, s) == Ordering::Equal) dup = true;
            if (!dup) valid.push_back(s);
        }
    }
    if (valid.size() == 1) return valid[0];
    if (valid.empty()) return std::nullopt;
    // flat tie segments cannot occur under the equalization preconditions
    throw PreconditionViolated("polytope equalization produced multiple crossings");
}

}  // namespace detail

namespace detail {

/// Bisection kernel: returns an enclosure of the crossing s of
/// F(X,Ys) = F(X',Y's) with width about 2^target_exp.
inline Interval equalize_s_bisect(const NormSpec& F, const Point& P, const Point& Pp, long target_exp,
                                  long max_bits) {
    Scalar X = P.x.abs(), Y = P.y.abs(), Xp = Pp.x.abs(), Yp = Pp.y.abs();
    int case_i;
    Ordering yord = compare(Yp, Y, max_bits);
    Ordering xord = compare(Xp, X, max_bits);
    if (yord == Ordering::Less)
        case_i = 1;
    else if (xord == Ordering::Less)
        case_i = 0;
    else
        throw PreconditionViolated("equalize_t: preconditions not met");

    // sign decisions only need precision comparable to the target width
    long cmp_bits = std::min(max_bits, -target_exp + 96);
    auto gap_sign = [&](const Scalar& s) -> int {
        Ordering o = compare(eval_weighted(F, X, Y, s), eval_weighted(F, Xp, Yp, s), cmp_bits);
        if (o == Ordering::Less) return -1;
        if (o == Ordering::Greater) return 1;
        return 0;
    };

    // neg: endpoint with gap <= 0 (s = 1 qualifies by the precondition);
    // pos: endpoint with gap proven > 0. The crossing lies between them.
    Scalar neg(1), pos(1);
    int guard = 0;
    if (case_i) {
        pos = Scalar(2);
        while (gap_sign(pos) <= 0) {
            neg = pos;
            pos = pos * Scalar(2);
            if (++guard > 64) throw NoSolution("equalize_t: bracket search failed");
        }
    } else {
        pos = Scalar(mpq_class(1, 2));
        while (gap_sign(pos) <= 0) {
            neg = pos;
            pos = pos * Scalar(mpq_class(1, 2));
            if (++guard > 64) throw NoSolution("equalize_t: bracket search failed");
        }
    }
    for (int it = 0; it < 300; ++it) {
        Interval w = (pos - neg).abs().enclosure(64);
        if (w.hi_double() < std::ldexp(1.0, static_cast<int>(target_exp))) break;
        Scalar mid = (neg + pos) * Scalar(mpq_class(1, 2));
        int sg = gap_sign(mid);
        if (sg == 0) break;  // undecidable at the cap: stop with the sound bracket
        if (sg > 0)
            pos = mid;
        else
            neg = mid;
    }
    mpfr_prec_t rp = clamp_prec(-target_exp + 32);
    return iv::hull(neg.enclosure(rp), pos.enclosure(rp));
}

}  // namespace detail

/// Solve F(X, Y s) = F(X', Y' s) for the unique s = t^2 > 0.
/// Case (i): F(P') >= F(P), |y'| < |y|  -> s >= 1.
/// Case (ii): F(P') >= F(P), |x'| < |x| -> s <= 1.
inline Scalar equalize_s(const NormSpec& F, const Point& P, const Point& Pp, long max_bits = -1) {
    if (max_bits < 0) max_bits = precision_cap().load();
    Scalar X = P.x.abs(), Y = P.y.abs(), Xp = Pp.x.abs(), Yp = Pp.y.abs();

    if (compare(eval(F, P), eval(F, Pp), max_bits) == Ordering::Equal) return Scalar(1);

    if (F.is_pnorm() && !F.is_inf()) {
        const mpq_class& p = *F.pnorm_tag().p;
        unsigned long num = p.get_num().get_ui(), den = p.get_den().get_ui();
        Scalar xs = detail::scalar_pow_q(X, num, den) - detail::scalar_pow_q(Xp, num, den);
        Scalar ys = detail::scalar_pow_q(Yp, num, den) - detail::scalar_pow_q(Y, num, den);
        if (ys.sign(max_bits) == 0 || xs.sign(max_bits) == 0 || xs.sign() != ys.sign())
            throw PreconditionViolated("equalize_t: no crossing for these points");
        // s^p = xs/ys
        return detail::scalar_pow_q(xs / ys, den, num);
    }

    if (P.x.is_exact() && P.y.is_exact() && Pp.x.is_exact() && Pp.y.is_exact()) {
        if (auto fns = polytope_functionals(F)) {
            if (auto s = detail::polytope_equalize_s(*fns, X, Y, Xp, Yp)) return *s;
            throw PreconditionViolated("equalize_t: no crossing for these points");
        }
    }

    Interval box = detail::equalize_s_bisect(F, P, Pp, -96, max_bits);
    NormSpec Fc = F;
    Point Pc = P, Ppc = Pp;
    long cap = max_bits;
    return Scalar::approx(box, [Fc, Pc, Ppc, cap](mpfr_prec_t prec) {
        return detail::equalize_s_bisect(Fc, Pc, Ppc, -(long)prec - 8, cap);
    });
}

/// The unique stretch with F_t(P) = F_t(P'); t >= 1 in case (i), <= 1 in (ii).
inline StretchFactor equalize_t(const NormSpec& F, const Point& P, const Point& Pp) {
    return StretchFactor{equalize_s(F, P, Pp).sqrt()};
}

/// K(P) = outer(left_scale * left(P), right(P)), rescaled to F(1,0)=1.
inline NormSpec compose(const NormSpec& H, const NormSpec& F, const NormSpec& G, Scalar left_scale = Scalar(1)) {
    ComposedTag tag{H, F, G, left_scale, Scalar(1)};
    Scalar norm_scale = eval(H, Point{left_scale, Scalar(1)});
    tag.norm_scale = norm_scale;
    return NormSpec(NormSpec::Variant(std::make_shared<const ComposedTag>(std::move(tag))));
}

/// First-quadrant boundary point r(theta)*(cos theta, sin theta) with F = 1.
inline Point boundary_point(const NormSpec& F, const Scalar& theta) {
    if (theta.is_exact() && theta.is_rational() && theta.rational() == 0) return Point{Scalar(1), Scalar(0)};
    Scalar th = theta;
    Scalar c = Scalar::approx(iv::cos(th.enclosure(128), 128),
                              [th](mpfr_prec_t p) { return iv::cos(th.enclosure(p + 8), p); });
    Scalar s = Scalar::approx(iv::sin(th.enclosure(128), 128),
                              [th](mpfr_prec_t p) { return iv::sin(th.enclosure(p + 8), p); });
    Scalar r = eval(F, Point{c, s}).inverse();
    return Point{r * c, r * s};
}

/// Fast non-certified evaluation for optimizers.
inline double eval_d(const NormSpec& F, double x, double y) {
    x = std::fabs(x);
    y = std::fabs(y);
    if (F.is_pnorm()) {
        const auto& t = F.pnorm_tag();
        if (t.is_inf()) return std::max(x, y);
        double p = t.p->get_d();
        if (p == 1.0) return x + y;
        if (p == 2.0) return std::hypot(x, y);
        return std::pow(std::pow(x, p) + std::pow(y, p), 1.0 / p);
    }
    static const double rh = std::sqrt(0.5);
    static const double sm1 = std::sqrt(2.0) - 1.0;
    if (F.is_oct1()) return std::max({x, y, (x + y) * rh});
    if (F.is_oct2()) return std::max(x + sm1 * y, sm1 * x + y);
    const ComposedTag& c = F.composed();
    double f = c.left_scale.to_double() * eval_d(c.left, x, y);
    double g = eval_d(c.right, x, y);
    return eval_d(c.outer, f, g) / c.norm_scale.to_double();
}

inline std::string norm_str(const NormSpec& F) {
    if (F.is_pnorm()) {
        const auto& t = F.pnorm_tag();
        if (t.is_inf()) return "p:inf";
        if (t.p->get_den() == 1) return "p:" + t.p->get_num().get_str();
        return "p:" + t.p->get_num().get_str() + "/" + t.p->get_den().get_str();
    }
    if (F.is_oct1()) return "oct1";
    if (F.is_oct2()) return "oct2";
    const ComposedTag& c = F.composed();
    return "compose(" + norm_str(c.outer) + ";" + norm_str(c.left) + ";" + norm_str(c.right) + ")";
}

/// Grammar: p:<decimal|inf> | oct1 | oct2 | compose(<spec>;<spec>;<spec>)
inline NormSpec parse_norm(const std::string& s);

namespace detail {

inline size_t find_top_semicolon(const std::string& s, size_t from) {
    int depth = 0;
    for (size_t i = from; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == ';' && depth == 0) return i;
    }
    return std::string::npos;
}

inline mpq_class parse_decimal(const std::string& s) {
    if (s.empty()) throw SpecParseError("empty number");
    size_t dot = s.find('.');
    try {
        if (dot == std::string::npos) {
            if (s.find('/') != std::string::npos) {
                mpq_class q(s);
                q.canonicalize();
                return q;
            }
            return mpq_class(mpz_class(s));
        }
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.empty()) throw SpecParseError("bad decimal: " + s);
        mpz_class num(ip.empty() ? "0" : ip);
        bool neg = !ip.empty() && ip[0] == '-';
        mpz_class scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        mpz_class frac(fp);
        mpz_class total = num * scale + (neg ? -frac : frac);
        mpq_class q(total, scale);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw SpecParseError("bad number: " + s);
    }
}

}  // namespace detail

inline NormSpec parse_norm(const std::string& s) {
    if (s == "oct1") return NormSpec::oct1();
    if (s == "oct2") return NormSpec::oct2();
    if (s.rfind("p:", 0) == 0) {
        std::string ps = s.substr(2);
        if (ps == "inf" || ps == "infinity") return NormSpec::pnorm_inf();
        mpq_class p = detail::parse_decimal(ps);
        if (p < 1) throw SpecParseError("p-norm requires p >= 1: " + s);
        return NormSpec::pnorm(p);
    }
    if (s.rfind("compose(", 0) == 0 && s.back() == ')') {
        std::string inner = s.substr(8, s.size() - 9);
        size_t c1 = detail::find_top_semicolon(inner, 0);
        if (c1 == std::string::npos) throw SpecParseError("compose needs three parts: " + s);
        size_t c2 = detail::find_top_semicolon(inner, c1 + 1);
        if (c2 == std::string::npos) throw SpecParseError("compose needs three parts: " + s);
        NormSpec H = parse_norm(inner.substr(0, c1));
        NormSpec F = parse_norm(inner.substr(c1 + 1, c2 - c1 - 1));
        NormSpec G = parse_norm(inner.substr(c2 + 1));
        return compose(H, F, G);
    }
    throw SpecParseError("unrecognized norm spec: " + s);
}

}  // namespace normcf
