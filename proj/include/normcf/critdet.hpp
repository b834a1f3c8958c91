#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "normcf/norms.hpp"

namespace normcf {

struct TauP {
    Scalar p;
    Scalar tau;  // root of tau^p + 1 = 2(1-tau)^p in (0, 1/2)
};

enum class CritBranch { Zero, One, General };

struct CritResult {
    Scalar delta;
    Point P;
    Point Pp;
    CritBranch branch;
};

namespace detail {

/// Certified sign of tau^p + 1 - 2(1-tau)^p at an exact rational tau.
inline int tau_eq_sign(const mpq_class& tau, const mpq_class& p, long max_bits) {
    unsigned long num = p.get_num().get_ui(), den = p.get_den().get_ui();
    Scalar t(tau);
    Scalar lhs = scalar_pow_q(t, num, den) + Scalar(1);
    Scalar rhs = Scalar(2) * scalar_pow_q(Scalar(1 - tau), num, den);
    Ordering o = compare(lhs, rhs, max_bits);
    if (o == Ordering::Less) return -1;
    if (o == Ordering::Greater) return 1;
    return 0;
}

inline Interval tau_bisect(const mpq_class& p, long width_exp, long max_bits) {
    long bits = std::min(max_bits, -width_exp + 96);
    mpq_class lo(1, 1024), hi(1, 2);
    while (tau_eq_sign(lo, p, bits) > 0) lo /= 2;
    for (int it = 0; it < 200; ++it) {
        mpq_class w = hi - lo;
        if (mpz_sizeinbase(w.get_den().get_mpz_t(), 2) >=
            mpz_sizeinbase(w.get_num().get_mpz_t(), 2) + static_cast<size_t>(-width_exp) + 2)
            break;
        mpq_class mid = (lo + hi) / 2;
        int sg = tau_eq_sign(mid, p, bits);
        if (sg == 0) break;
        if (sg < 0)
            lo = mid;
        else
            hi = mid;
    }
    mpfr_prec_t pr = clamp_prec(-width_exp + 16);
    return Interval::from_endpoints(Interval::from_mpq(lo, pr), Interval::from_mpq(hi, pr));
}

}  // namespace detail

/// Root of tau^p + 1 = 2(1-tau)^p in (0, 1/2); exact for p = 1, 2.
inline TauP tau_p(const Scalar& p, long width_exp = -64) {
    if (!p.is_rational()) throw PreconditionViolated("tau_p expects rational p");
    const mpq_class& pq = p.rational();
    if (pq < 1) throw PreconditionViolated("tau_p requires p >= 1");
    if (pq == 1) return TauP{p, Scalar(mpq_class(1, 3))};
    if (pq == 2) return TauP{p, Scalar(Surd(2, -1, 3, 1))};  // 2 - sqrt(3)
    mpq_class pc = pq;
    long cap = precision_cap().load();
    Interval box = detail::tau_bisect(pc, width_exp, cap);
    return TauP{p, Scalar::approx(box, [pc, cap](mpfr_prec_t prec) {
                    return detail::tau_bisect(pc, -(long)prec, cap);
                })};
}

namespace detail {

inline Scalar pow_scalar_q(const Scalar& x, const mpq_class& e) {
    return scalar_pow_q(x, e.get_num().get_ui(), e.get_den().get_ui());
}

}  // namespace detail

/// Delta_p^(0) = (1 - 2^-p)^(1/p).
inline Scalar delta_p_zero(const mpq_class& p) {
    Scalar half_pow = detail::pow_scalar_q(Scalar(mpq_class(1, 2)), p);
    mpq_class inv(p.get_den(), p.get_num());
    return detail::pow_scalar_q(Scalar(1) - half_pow, inv);
}

/// Delta_p^(1) = 2^(-2/p) (1+tau_p)/(1-tau_p).
inline Scalar delta_p_one(const mpq_class& p) {
    Scalar tau = tau_p(Scalar(p)).tau;
    mpq_class two_over_p(2 * p.get_den(), p.get_num());
    two_over_p.canonicalize();
    Scalar pw = detail::pow_scalar_q(Scalar(mpq_class(1, 2)), two_over_p);
    return pw * (Scalar(1) + tau) / (Scalar(1) - tau);
}

/// Critical determinant of the p-norm ball with a minimizing pair
/// (P, P', P+P' all on the unit sphere). p = nullopt means the sup norm.
inline CritResult delta_p(const std::optional<mpq_class>& p) {
    if (!p.has_value()) {
        return CritResult{Scalar(1), Point{Scalar(1), Scalar(0)}, Point{Scalar(0), Scalar(1)}, CritBranch::One};
    }
    const mpq_class& pq = *p;
    if (pq < 1) throw PreconditionViolated("delta_p requires p >= 1");
    if (pq == 1) {
        return CritResult{Scalar(mpq_class(1, 2)), Point{Scalar(1), Scalar(0)},
                          Point{Scalar(mpq_class(-1, 2)), Scalar(mpq_class(1, 2))}, CritBranch::One};
    }
    Scalar d0 = delta_p_zero(pq);
    Scalar d1 = delta_p_one(pq);
    bool zero_branch;
    if (pq == 2)
        zero_branch = true;  // the two branches coincide at p = 2
    else if (pq < 2)
        zero_branch = false;
    else {
        Ordering o = compare(d0, d1);
        if (o == Ordering::Ambiguous) throw AmbiguousError("delta_p branch undecidable (p at the crossover?)");
        zero_branch = o != Ordering::Greater;
    }
    mpq_class inv_p(pq.get_den(), pq.get_num());
    if (zero_branch) {
        // P = (1,0), P' = -(1/2, (2^p-1)^(1/p)/2)
        Scalar twop = detail::pow_scalar_q(Scalar(2), pq);
        Scalar yc = detail::pow_scalar_q(twop - Scalar(1), inv_p) * Scalar(mpq_class(1, 2));
        return CritResult{d0, Point{Scalar(1), Scalar(0)}, Point{Scalar(mpq_class(-1, 2)), -yc},
                          CritBranch::Zero};
    }
    Scalar tau = tau_p(Scalar(pq)).tau;
    Scalar c = detail::pow_scalar_q(Scalar(mpq_class(1, 2)), inv_p);  // 2^(-1/p)
    Scalar inv1mt = (Scalar(1) - tau).inverse();
    Point P{c * inv1mt, -(c * tau * inv1mt)};
    Point Pp{-c, -c};
    return CritResult{d1, P, Pp, CritBranch::One};
}

inline CritResult delta_p(const NormSpec& F) {
    if (!F.is_pnorm()) throw PreconditionViolated("delta_p needs a p-norm");
    return delta_p(F.pnorm_tag().p);
}

namespace detail {

inline int rho_sign(const mpq_class& p, long max_bits) {
    Scalar d0 = delta_p_zero(p), d1 = delta_p_one(p);
    Ordering o = compare(d0, d1, max_bits);
    if (o == Ordering::Less) return -1;
    if (o == Ordering::Greater) return 1;
    return 0;
}

inline Interval rho_bisect(long width_exp, long max_bits) {
    long bits = std::min(max_bits, -width_exp + 96);
    mpq_class lo(5, 2), hi(27, 10);  // sign change bracketed in [2.5, 2.7]
    if (rho_sign(lo, bits) > 0 || rho_sign(hi, bits) < 0)
        throw NoSolution("rho: initial bracket failed");
    for (int it = 0; it < 200; ++it) {
        mpq_class w = hi - lo;
        if (mpz_sizeinbase(w.get_den().get_mpz_t(), 2) >=
            mpz_sizeinbase(w.get_num().get_mpz_t(), 2) + static_cast<size_t>(-width_exp) + 2)
            break;
        mpq_class mid = (lo + hi) / 2;
        int sg = rho_sign(mid, bits);
        if (sg == 0) break;
        if (sg < 0)
            lo = mid;
        else
            hi = mid;
    }
    mpfr_prec_t pr = clamp_prec(-width_exp + 16);
    return Interval::from_endpoints(Interval::from_mpq(lo, pr), Interval::from_mpq(hi, pr));
}

}  // namespace detail

/// The crossover where Delta_p^(0) = Delta_p^(1); lies in (2.57, 2.58).
inline Scalar rho(long width_exp = -48) {
    long cap = precision_cap().load();
    Interval box = detail::rho_bisect(width_exp, cap);
    return Scalar::approx(box, [cap](mpfr_prec_t prec) { return detail::rho_bisect(-(long)prec, cap); });
}

namespace detail {

/// Boundary point at angle phi (full circle) in doubles.
inline void boundary_d(const NormSpec& F, double phi, double& x, double& y) {
    double c = std::cos(phi), s = std::sin(phi);
    double r = 1.0 / eval_d(F, c, s);
    x = r * c;
    y = r * s;
}

/// For fixed P on the boundary, find phi in (theta, theta+pi) with
/// F(P + P'(phi)) = 1 and return |det(P, P')|.
inline double pair_det_d(const NormSpec& F, double theta, double* phi_out = nullptr) {
    double px, py;
    boundary_d(F, theta, px, py);
    double lo = theta + 1e-9, hi = theta + M_PI - 1e-9;
    auto g = [&](double phi) {
        double qx, qy;
        boundary_d(F, phi, qx, qy);
        return eval_d(F, px + qx, py + qy) - 1.0;
    };
    double glo = g(lo);
    if (glo < 0) return std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0)
            lo = mid;
        else
            hi = mid;
    }
    double phi = 0.5 * (lo + hi);
    double qx, qy;
    boundary_d(F, phi, qx, qy);
    if (phi_out) *phi_out = phi;
    return std::fabs(px * qy - py * qx);
}

}  // namespace detail

/// Heuristic global minimizer for the critical determinant of an arbitrary
/// strongly symmetric norm: grid over theta, golden-section polish, then a
/// certified re-evaluation of the minimizing pair. The result is an upper
/// bound for Delta; tests cross-check it against Minkowski's lower bound.
inline CritResult delta_general(const NormSpec& F, int grid = 360, int polish_iters = 120) {
    if (grid < 8) throw PreconditionViolated("delta_general needs grid >= 8");
    double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        double theta = (M_PI / 2) * i / grid;
        double det = detail::pair_det_d(F, theta);
        if (det < best) {
            best = det;
            best_theta = theta;
        }
    }
    if (!std::isfinite(best)) throw NoSolution("delta_general: no admissible pair found");
    // golden-section polish around the best grid angle
    double step = (M_PI / 2) / grid;
    double a = best_theta - step, b = best_theta + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = detail::pair_det_d(F, c), fd = detail::pair_det_d(F, d);
    for (int it = 0; it < polish_iters; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = detail::pair_det_d(F, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = detail::pair_det_d(F, d);
        }
    }
    double theta_star = fc < fd ? c : d;
    if (theta_star < 0) theta_star = 0;
    double phi_star = 0;
    double det_star = detail::pair_det_d(F, theta_star, &phi_star);
    (void)det_star;

    // certified re-evaluation at the located angles (folded into the first
    // quadrant with signs restored)
    auto bpoint_full = [&](double ang) {
        double cx = std::cos(ang), sy = std::sin(ang);
        double base = std::atan2(std::fabs(sy), std::fabs(cx));
        Scalar th = Scalar::approx(Interval::from_double(base, 192),
                                   [base](mpfr_prec_t p2) { return Interval::from_double(base, p2); });
        Point Q = boundary_point(F, th);
        if (cx < 0) Q.x = -Q.x;
        if (sy < 0) Q.y = -Q.y;
        return Q;
    };
    Point P = bpoint_full(theta_star);
    Point Pp = bpoint_full(phi_star);
    Scalar det = (P.x * Pp.y - P.y * Pp.x).abs();
    return CritResult{det, P, Pp, CritBranch::General};
}

/// Certified enclosure of area(B) by polar quadrature with a Lipschitz bound
/// (|r(a)-r(b)| <= 2*sqrt(2)*|a-b| for normalized strongly symmetric norms).
inline Interval area_of_ball(const NormSpec& F, int cells = 4096) {
    mpfr_prec_t prec = 96;
    Interval total = Interval::from_si(0, prec);
    Interval half_pi = iv::div(iv::const_pi(prec), Interval::from_si(2, 16), prec);
    Interval lip = iv::mul(Interval::from_double(2.83, prec), half_pi, prec);  // Lip * (pi/2), scaled per cell
    for (int i = 0; i < cells; ++i) {
        // theta in [i,(i+1)]*pi/(2*cells)
        Interval tmid = iv::mul(half_pi, Interval::from_mpq(mpq_class(2 * i + 1, 2 * cells), prec), prec);
        Interval c = iv::cos(tmid, prec), s = iv::sin(tmid, prec);
        Scalar fc = eval(F, Point{Scalar::approx(c), Scalar::approx(s)});
        Interval r = iv::div(Interval::from_si(1, prec), fc.enclosure(prec), prec);
        // pad by Lipschitz * half cell width
        Interval pad = iv::div(lip, Interval::from_si(2 * cells, prec), prec);
        Interval rlo = iv::sub(r, pad, prec), rhi = iv::add(r, pad, prec);
        if (mpfr_sgn(rlo.lo()) < 0) {
            Interval z = Interval::from_si(0, prec);
            rlo = iv::max(rlo, z);
        }
        Interval r2 = Interval::from_endpoints(iv::mul(rlo, rlo, prec), iv::mul(rhi, rhi, prec));
        Interval dtheta = iv::div(half_pi, Interval::from_si(cells, prec), prec);
        total = iv::add(total, iv::mul(r2, dtheta, prec), prec);
    }
    // area = 4 * (1/2) * integral r^2 dtheta
    return iv::mul(total, Interval::from_si(2, 16), prec);
}

/// Exact critical determinants where the paper records closed forms; the
/// numerical minimizer covers everything else.
inline Scalar delta_of_norm(const NormSpec& F) {
    if (F.is_pnorm()) return delta_p(F).delta;
    if (F.is_oct1()) return Scalar(Surd(-1, 2, 2, 2));  // sqrt2 - 1/2
    if (F.is_oct2()) return Scalar(Surd(2, 3, 2, 8));   // (3 sqrt2 + 2)/8
    return delta_general(F).delta;
}

}  // namespace normcf
