#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normcf/regcf.hpp"

using namespace normcf;

namespace {

AlphaSpec sqrt3m1_half() { return SurdAlpha{Surd(-1, 1, 3, 2)}; }   // (-1+sqrt3)/2
AlphaSpec golden() { return SurdAlpha{Surd(1, 1, 5, 2)}; }          // (1+sqrt5)/2
AlphaSpec golden_conj() { return SurdAlpha{Surd(-1, 1, 5, 2)}; }    // (sqrt5-1)/2
AlphaSpec euler() { return ArithAlpha{0, 2, 4}; }                   // (e-1)/(e+1)

}  // namespace

TEST_CASE("digit streams for the paper's alpha families") {
    auto d1 = digits(sqrt3m1_half(), 6);
    std::vector<long> want1{0, 2, 1, 2, 1, 2};
    for (int i = 0; i < 6; ++i) CHECK(d1[i] == want1[i]);

    auto d2 = digits(euler(), 4);
    std::vector<long> want2{0, 2, 6, 10};
    for (int i = 0; i < 4; ++i) CHECK(d2[i] == want2[i]);

    auto d3 = digits(golden(), 5);
    std::vector<long> want3{1, 1, 1, 1, 1};
    for (int i = 0; i < 5; ++i) CHECK(d3[i] == want3[i]);

    auto d4 = digits(AlphaSpec(PeriodicAlpha{0, {}, {2}}), 4);  // sqrt2 - 1
    std::vector<long> want4{0, 2, 2, 2};
    for (int i = 0; i < 4; ++i) CHECK(d4[i] == want4[i]);
}

TEST_CASE("rational alpha is rejected") {
    CHECK_THROWS_AS(RegularCf(AlphaSpec(SurdAlpha{Surd(3, 0, 5, 2)}), 8), RationalAlphaError);
    CHECK_THROWS_AS(parse_alpha("surd:3,0,5,2"), RationalAlphaError);
}

TEST_CASE("uv pairs: exact tails for surds") {
    auto cf = RegularCf::make(golden_conj());
    Surd beta(-1, 1, 5, 2);
    for (long n = 0; n < 8; ++n) {
        Scalar u = cf->u(n);
        REQUIRE(u.is_surd());
        CHECK(u.surd().equals(beta));
    }
    CHECK(cf->v(0) == 0);

    auto cf3 = RegularCf::make(sqrt3m1_half());
    Surd alpha(-1, 1, 3, 2);
    Surd twoalpha(-1, 1, 3, 1);
    for (long n = 0; n < 9; ++n) {
        Scalar u = cf3->u(n);
        REQUIRE(u.is_surd());
        CHECK(u.surd().equals(n % 2 == 0 ? alpha : twoalpha));
    }
}

TEST_CASE("uv enclosures for digit-defined streams") {
    auto cf = RegularCf::make(euler(), 64);
    Interval u0 = cf->u_enclosure(0, 80);
    CHECK(u0.width_leq_2exp(-80));
    // (e-1)/(e+1) = 0.46211715726...
    CHECK(u0.lo_double() <= 0.4621171573);
    CHECK(u0.hi_double() >= 0.4621171572);
    DInterval ud = cf->u_dint(0);
    CHECK(ud.lo <= 0.46211715726001);
    CHECK(ud.hi >= 0.46211715725999);
    CHECK(ud.width() < 1e-12);
}

TEST_CASE("gauss_T map") {
    auto [z1, z2] = gauss_T(Scalar(0), Scalar(mpq_class(7, 10)));
    CHECK(z1.is_exact_zero());
    CHECK(z2.is_exact_zero());

    Surd beta(-1, 1, 5, 2);
    auto [b1, b2] = gauss_T(Scalar(beta), Scalar(beta));
    REQUIRE(b1.is_surd());
    CHECK(b1.surd().equals(beta));
    REQUIRE(b2.is_surd());
    CHECK(b2.surd().equals(beta));

    auto [c1, c2] = gauss_T(Scalar(mpq_class(2, 5)), Scalar(mpq_class(1, 2)));
    CHECK(c1.rational() == mpq_class(1, 2));
    CHECK(c2.rational() == mpq_class(2, 5));
}

TEST_CASE("omega_density") {
    Interval d0 = omega_density(Scalar(0), Scalar(0)).enclosure(96);
    CHECK(d0.lo_double() <= 1.4426950409);
    CHECK(d0.hi_double() >= 1.4426950408);
    Interval d1 = omega_density(Scalar(1), Scalar(1)).enclosure(96);
    CHECK(d1.lo_double() <= 0.36067376023);
    CHECK(d1.hi_double() >= 0.36067376022);
}

TEST_CASE("omega density integrates to 1 over the unit square") {
    // midpoint quadrature with interval bounds per cell (density is monotone
    // decreasing in the product uv)
    const int N = 64;
    Interval total_lo = Interval::from_si(0, 96), total_hi = Interval::from_si(0, 96);
    Interval ln2 = iv::const_ln2(96);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            mpq_class u0(i, N), u1(i + 1, N), v0(j, N), v1(j + 1, N);
            auto dens = [&](const mpq_class& u, const mpq_class& v) {
                mpq_class t = (1 + u * v) * (1 + u * v);
                return iv::div(Interval::from_si(1, 96), iv::mul(ln2, Interval::from_mpq(t, 96), 96), 96);
            };
            Interval cell_hi = dens(u0, v0);  // max at low corner
            Interval cell_lo = dens(u1, v1);
            Interval area = Interval::from_mpq(mpq_class(1, N * N), 96);
            total_lo = iv::add(total_lo, iv::mul(cell_lo, area, 96), 96);
            total_hi = iv::add(total_hi, iv::mul(cell_hi, area, 96), 96);
        }
    }
    CHECK(total_lo.lo_double() <= 1.0);
    CHECK(total_hi.hi_double() >= 1.0);
    CHECK(total_hi.hi_double() - total_lo.lo_double() < 0.05);
}

TEST_CASE("property: determinant identity and approximation quality") {
    std::mt19937_64 seeds(123);
    for (int trial = 0; trial < 6; ++trial) {
        AlphaSpec spec = trial < 3 ? AlphaSpec(RandomAlpha{seeds()})
                                   : (trial == 3 ? golden() : (trial == 4 ? euler() : sqrt3m1_half()));
        auto cf = RegularCf::make(spec, 80);
        Scalar alpha = cf->alpha_scalar();
        for (long n = 1; n < 60; ++n) {
            mpz_class det = cf->r(n) * cf->s(n - 1) - cf->r(n - 1) * cf->s(n);
            CHECK(det == ((n % 2 == 1) ? 1 : -1));
            // |alpha - r_n/s_n| < 1/s_n^2
            Scalar err = (alpha - Scalar::ratio(cf->r(n), cf->s(n))).abs();
            Scalar bound = Scalar::ratio(1, cf->s(n) * cf->s(n));
            CHECK(compare(err, bound) == Ordering::Less);
        }
    }
}

TEST_CASE("property: T-consistency of (u_n, v_n)") {
    for (AlphaSpec spec : {golden_conj(), sqrt3m1_half(), AlphaSpec(SurdAlpha{Surd(0, 1, 7, 1)})}) {
        auto cf = RegularCf::make(spec);
        for (long n = 0; n < 20; ++n) {
            auto [u, v] = cf->uv(n);
            auto [nu, nv] = gauss_T(u, v);
            auto [u1, v1] = cf->uv(n + 1);
            CHECK(compare(nu, u1) == Ordering::Equal);
            CHECK(compare(nv, v1) == Ordering::Equal);
        }
    }
}

TEST_CASE("property: surd digit streams are eventually periodic and replay") {
    const long dvals[] = {2, 3, 5, 6, 7, 10, 13, 19, 31, 46};
    for (long d : dvals) {
        auto cf = RegularCf::make(AlphaSpec(SurdAlpha{Surd(0, 1, d, 1)}));
        auto per = cf->detect_period();
        REQUIRE(per.has_value());
        auto [start, len] = *per;
        cf->ensure(start + 3 * len + 2);
        for (long n = start; n < start + 2 * len; ++n) CHECK(cf->digit(n) == cf->digit(n + len));
    }
}

TEST_CASE("random streams are deterministic and certified") {
    auto a = RegularCf::make(AlphaSpec(RandomAlpha{42}), 128);
    auto b = RegularCf::make(AlphaSpec(RandomAlpha{42}), 16);
    for (long n = 0; n < 120; ++n) CHECK(a->digit(n) == b->digit(n));
    auto c = RegularCf::make(AlphaSpec(RandomAlpha{43}), 64);
    bool differ = false;
    for (long n = 1; n < 40 && !differ; ++n) differ = a->digit(n) != c->digit(n);
    CHECK(differ);
}

TEST_CASE("alpha spec grammar round trips") {
    for (const char* s : {"surd:-1,1,5,2", "cf:0;1,2;(3,4)", "cf-arith:0;2,4", "cf-prefix:0;1,2,3", "random:7"}) {
        AlphaSpec a = parse_alpha(s);
        CHECK(alpha_str(a) == s);
    }
    CHECK_THROWS_AS(parse_alpha("cf-prefix:0;"), SpecParseError);
    CHECK_THROWS_AS(parse_alpha("nonsense"), SpecParseError);
    CHECK_THROWS_AS(parse_alpha("cf:0;1;(0)"), SpecParseError);
    // prefix streams exhaust
    auto cf = RegularCf::make(parse_alpha("cf-prefix:0;1,2,3"));
    CHECK_THROWS_AS(cf->digit(5), PrefixExhausted);
}
