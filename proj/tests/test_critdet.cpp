#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "normcf/critdet.hpp"

using namespace normcf;

namespace {

bool encloses(const Interval& e, double v) { return e.lo_double() <= v && v <= e.hi_double(); }

// independent double-precision bisection oracle for tau_p
double tau_oracle(double p) {
    auto f = [&](double t) { return std::pow(t, p) + 1.0 - 2.0 * std::pow(1.0 - t, p); };
    double lo = 1e-9, hi = 0.5 - 1e-9;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double delta_oracle(double p) {
    double d0 = std::pow(1.0 - std::pow(2.0, -p), 1.0 / p);
    double t = tau_oracle(p);
    double d1 = std::pow(2.0, -2.0 / p) * (1.0 + t) / (1.0 - t);
    return std::min(d0, d1);
}

}  // namespace

TEST_CASE("tau_p") {
    CHECK(tau_p(Scalar(1)).tau.rational() == mpq_class(1, 3));
    Scalar t2 = tau_p(Scalar(2)).tau;
    REQUIRE(t2.is_surd());
    CHECK(t2.surd().equals(Surd(2, -1, 3, 1)));
    CHECK(std::fabs(t2.enclosure(96).mid_double() - (2.0 - std::sqrt(3.0))) < 1e-12);

    Scalar t4 = tau_p(Scalar(4), -52).tau;
    Interval e = t4.enclosure(80);
    double oracle = tau_oracle(4.0);
    CHECK(e.lo_double() <= oracle + 1e-14);
    CHECK(e.hi_double() >= oracle - 1e-14);
    // defining equation holds at the enclosure
    Scalar resid = t4.pow_int(4) + Scalar(1) - Scalar(2) * (Scalar(1) - t4).pow_int(4);
    Interval re = resid.enclosure(96);
    CHECK(re.lo_double() <= 0.0);
    CHECK(re.hi_double() >= 0.0);
}

TEST_CASE("delta_p closed forms") {
    CritResult d1 = delta_p(std::optional<mpq_class>(mpq_class(1)));
    CHECK(d1.delta.rational() == mpq_class(1, 2));

    CritResult d2 = delta_p(std::optional<mpq_class>(mpq_class(2)));
    REQUIRE(d2.delta.is_surd());
    CHECK(d2.delta.surd().equals(Surd(0, 1, 3, 2)));  // sqrt3/2
    CHECK(d2.branch == CritBranch::Zero);

    CritResult di = delta_p(std::optional<mpq_class>());
    CHECK(di.delta.rational() == 1);

    // oracle comparison across a p-grid
    for (mpq_class p : {mpq_class(3, 2), mpq_class(5, 2), mpq_class(3), mpq_class(4), mpq_class(5)}) {
        CritResult d = delta_p(std::optional<mpq_class>(p));
        double want = delta_oracle(p.get_d());
        Interval e = d.delta.enclosure(96);
        CHECK(std::fabs(e.mid_double() - want) < 1e-9);
    }
}

TEST_CASE("delta_p minimizing pairs lie on the unit sphere") {
    for (mpq_class p : {mpq_class(1), mpq_class(2), mpq_class(3), mpq_class(7, 2)}) {
        NormSpec F = NormSpec::pnorm(p);
        CritResult d = delta_p(std::optional<mpq_class>(p));
        for (const Point& Q : {d.P, d.Pp, Point{d.P.x + d.Pp.x, d.P.y + d.Pp.y}}) {
            Interval e = eval(F, Q).enclosure(128);
            CHECK(encloses(e, 1.0));
            CHECK(e.width_leq_2exp(-40));
        }
        // delta = |x y' - y x'|
        Scalar det = (d.P.x * d.Pp.y - d.P.y * d.Pp.x).abs();
        Interval de = (det - d.delta).enclosure(128);
        CHECK(encloses(de, 0.0));
    }
    // sup norm pair is exact
    CritResult di = delta_p(std::optional<mpq_class>());
    CHECK(eval(NormSpec::pnorm_inf(), Point{di.P.x + di.Pp.x, di.P.y + di.Pp.y}).rational() == 1);
}

TEST_CASE("rho lands in the paper's bracket") {
    Scalar r = rho(-40);
    Interval e = r.enclosure(64);
    CHECK(e.lo_double() > 2.57);
    CHECK(e.hi_double() < 2.58);
    // defining property: the two branches agree at rho within the width
    Interval tight = rho(-64).enclosure(96);
    mpq_class pm;
    mpfr_get_q(pm.get_mpq_t(), tight.lo());
    Scalar diff = delta_p_zero(pm) - delta_p_one(pm);
    Interval de = diff.enclosure(96);
    CHECK(std::fabs(de.mid_double()) < 1e-9);
    // branch order flips across rho
    CHECK(compare(delta_p_zero(mpq_class(5, 2)), delta_p_one(mpq_class(5, 2))) == Ordering::Less);
    CHECK(compare(delta_p_zero(mpq_class(13, 5)), delta_p_one(mpq_class(13, 5))) == Ordering::Greater);
}

TEST_CASE("delta_general reproduces the octagon values") {
    CritResult o1 = delta_general(NormSpec::oct1());
    double want1 = std::sqrt(2.0) - 0.5;
    CHECK(std::fabs(o1.delta.enclosure(96).mid_double() - want1) < 1e-8);
    CHECK(o1.branch == CritBranch::General);

    CritResult o2 = delta_general(NormSpec::oct2());
    double want2 = (3.0 * std::sqrt(2.0) + 2.0) / 8.0;
    CHECK(std::fabs(o2.delta.enclosure(96).mid_double() - want2) < 1e-8);

    // pairs on the unit sphere within 1e-10
    for (const CritResult* r : {&o1, &o2}) {
        const NormSpec& F = r == &o1 ? NormSpec::oct1() : NormSpec::oct2();
        for (const Point& Q : {r->P, r->Pp, Point{r->P.x + r->Pp.x, r->P.y + r->Pp.y}}) {
            double v = eval(F, Q).enclosure(96).mid_double();
            CHECK(std::fabs(v - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("delta_general agrees with the closed form on a p-grid") {
    for (mpq_class p : {mpq_class(1), mpq_class(3, 2), mpq_class(2), mpq_class(5, 2), mpq_class(3), mpq_class(4),
                        mpq_class(5)}) {
        NormSpec F = NormSpec::pnorm(p);
        CritResult g = delta_general(F);
        CritResult c = delta_p(std::optional<mpq_class>(p));
        double gv = g.delta.enclosure(96).mid_double();
        double cv = c.delta.enclosure(96).mid_double();
        CHECK(std::fabs(gv - cv) < 1e-6);
    }
    CritResult gi = delta_general(NormSpec::pnorm_inf());
    CHECK(std::fabs(gi.delta.enclosure(96).mid_double() - 1.0) < 1e-6);
}

TEST_CASE("Minkowski lower bound: delta >= area/4 (no certified violation)") {
    struct Case {
        NormSpec F;
        Scalar delta;
    };
    std::vector<Case> cases;
    cases.push_back({NormSpec::pnorm(1), delta_p(std::optional<mpq_class>(mpq_class(1))).delta});
    cases.push_back({NormSpec::pnorm(2), delta_p(std::optional<mpq_class>(mpq_class(2))).delta});
    cases.push_back({NormSpec::pnorm(4), delta_p(std::optional<mpq_class>(mpq_class(4))).delta});
    cases.push_back({NormSpec::pnorm_inf(), delta_p(std::optional<mpq_class>()).delta});
    cases.push_back({NormSpec::oct1(), delta_of_norm(NormSpec::oct1())});
    cases.push_back({NormSpec::oct2(), delta_of_norm(NormSpec::oct2())});
    for (const auto& c : cases) {
        Interval area = area_of_ball(c.F, 2048);
        Interval d = c.delta.enclosure(96);
        // sound check: reject only a certified violation delta < area/4
        CHECK(d.hi_double() * 4.0 >= area.lo_double());
        // sanity: the enclosure is meaningful
        CHECK(area.hi_double() - area.lo_double() < 0.02);
        CHECK(area.hi_double() <= 4.0 + 0.01);
    }
    // sharpness for the 1-norm and sup norm
    Interval a1 = area_of_ball(NormSpec::pnorm(1), 2048);
    CHECK(encloses(a1, 2.0));
    Interval ai = area_of_ball(NormSpec::pnorm_inf(), 2048);
    CHECK(encloses(ai, 4.0));
}

TEST_CASE("exact octagon critical determinants back the closed-form table") {
    Scalar o1 = delta_of_norm(NormSpec::oct1());
    REQUIRE(o1.is_surd());
    CHECK(encloses(o1.enclosure(96), std::sqrt(2.0) - 0.5));
    Scalar o2 = delta_of_norm(NormSpec::oct2());
    REQUIRE(o2.is_surd());
    CHECK(encloses(o2.enclosure(96), (3.0 * std::sqrt(2.0) + 2.0) / 8.0));
}
