#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normcf/scalar.hpp"

using namespace normcf;

namespace {

Scalar golden() { return Scalar(Surd(1, 1, 5, 2)); }  // (1+sqrt5)/2

mpq_class rand_q(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-1000, 1000);
    std::uniform_int_distribution<long> den(1, 1000);
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("compare decides exact orderings") {
    CHECK(compare(golden(), Scalar(mpq_class(809, 500))) == Ordering::Greater);
    CHECK(compare(golden(), golden()) == Ordering::Equal);
    CHECK(compare(Scalar(mpq_class(1, 3)), Scalar(mpq_class(1, 3))) == Ordering::Equal);
    CHECK(compare(Scalar(Surd(0, 1, 2, 1)), Scalar(mpq_class(3, 2))) == Ordering::Less);
    // distinct fields
    CHECK(compare(Scalar(Surd(0, 1, 2, 1)), Scalar(Surd(0, 1, 3, 1))) == Ordering::Less);
}

TEST_CASE("compare returns Ambiguous for overlapping enclosures at a small cap") {
    Interval box = Interval::from_endpoints(Interval::from_mpq(mpq_class(4999, 10000), 64),
                                            Interval::from_mpq(mpq_class(5001, 10000), 64));
    Scalar x = Scalar::approx(box);  // no generator: cannot refine
    CHECK(compare(x, Scalar(mpq_class(1, 2)), 256) == Ordering::Ambiguous);
}

TEST_CASE("refine reaches the requested width") {
    Interval e = refine(Scalar(Surd(0, 1, 2, 1)), -20);
    CHECK(e.width_leq_2exp(-20));
    CHECK(e.lo_double() <= 1.41421357);
    CHECK(e.hi_double() >= 1.41421356);

    Interval t = refine(Scalar(mpq_class(1, 3)), -80);
    CHECK(t.width_leq_2exp(-80));

    Interval g = refine(golden(), -10);
    CHECK(g.lo_double() <= 1.6180340);
    CHECK(g.hi_double() >= 1.6180339);
}

TEST_CASE("root_pth certified enclosures") {
    Interval r = root_pth(Scalar(4), Scalar(2), -40);
    CHECK(r.lo_double() <= 2.0);
    CHECK(r.hi_double() >= 2.0);
    CHECK(r.width_leq_2exp(-40));

    Interval s = root_pth(Scalar(2), Scalar(2), -30);
    CHECK(s.lo_double() <= 1.4142135624);
    CHECK(s.hi_double() >= 1.4142135623);

    Interval one = root_pth(Scalar(1), Scalar(mpq_class(7, 2)), -30);
    CHECK(one.lo_double() <= 1.0);
    CHECK(one.hi_double() >= 1.0);
}

TEST_CASE("property: interval image contains the exact rational result") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 10000; ++i) {
        mpq_class a = rand_q(rng), b = rand_q(rng);
        int op = static_cast<int>(rng() % 4);
        if (op == 3 && b == 0) b = 1;
        mpq_class exact;
        switch (op) {
            case 0: exact = a + b; break;
            case 1: exact = a - b; break;
            case 2: exact = a * b; break;
            default: exact = a / b; break;
        }
        Interval ia = Interval::from_mpq(a, 48), ib = Interval::from_mpq(b, 48);
        Interval r;
        switch (op) {
            case 0: r = iv::add(ia, ib, 48); break;
            case 1: r = iv::sub(ia, ib, 48); break;
            case 2: r = iv::mul(ia, ib, 48); break;
            default: r = iv::div(ia, ib, 48); break;
        }
        Interval tight = Interval::from_mpq(exact, 128);
        REQUIRE(mpfr_lessequal_p(r.lo(), tight.lo()));
        REQUIRE(mpfr_greaterequal_p(tight.hi(), tight.hi()));
        REQUIRE(mpfr_lessequal_p(tight.hi(), r.hi()));
    }
}

TEST_CASE("property: surd canonicalization is idempotent and value-preserving") {
    std::mt19937_64 rng(7);
    const long ds[] = {2, 3, 5, 6, 7, 10, 11, 13};
    for (int i = 0; i < 2000; ++i) {
        long a = static_cast<long>(rng() % 41) - 20;
        long b = static_cast<long>(rng() % 41) - 20;
        if (b == 0) b = 1;
        long c = static_cast<long>(rng() % 20) + 1;
        if (rng() & 1) c = -c;
        long d = ds[rng() % 8];
        long k = static_cast<long>(rng() % 5) + 1;
        Surd s1(a, b, d * k * k, c);
        Surd s2(a, b * k, d, c);
        REQUIRE(s1.equals(s2));
        // idempotent under re-canonicalization
        Surd s3(s1.a(), s1.b(), s1.d(), s1.c());
        REQUIRE(s3.equals(s1));
        // value preserved: interval cross-check
        Interval e1 = s1.enclosure(64);
        Interval raw = iv::div(iv::add(Interval::from_si(a, 96),
                                       iv::mul(Interval::from_si(b, 96),
                                               iv::sqrt(Interval::from_si(d * k * k, 96), 96), 96),
                                       96),
                               Interval::from_si(c, 96), 96);
        REQUIRE(!iv::disjoint(e1, raw));
    }
}

TEST_CASE("property: compare is antisymmetric and transitive on exact values") {
    std::mt19937_64 rng(99);
    auto rand_scalar = [&](void) -> Scalar {
        if (rng() % 2) return Scalar(rand_q(rng));
        long a = static_cast<long>(rng() % 21) - 10;
        long b = static_cast<long>(rng() % 21) - 10;
        if (b == 0) b = 3;
        long c = static_cast<long>(rng() % 9) + 1;
        return Scalar(Surd(a, b, (rng() % 2) ? 2 : 5, c));
    };
    for (int i = 0; i < 10000; ++i) {
        Scalar x = rand_scalar(), y = rand_scalar(), z = rand_scalar();
        Ordering xy = compare(x, y), yx = compare(y, x);
        REQUIRE(xy != Ordering::Ambiguous);
        if (xy == Ordering::Less) REQUIRE(yx == Ordering::Greater);
        if (xy == Ordering::Greater) REQUIRE(yx == Ordering::Less);
        if (xy == Ordering::Equal) REQUIRE(yx == Ordering::Equal);
        Ordering yz = compare(y, z), xz = compare(x, z);
        if (xy == Ordering::Less && yz == Ordering::Less) REQUIRE(xz == Ordering::Less);
        if (xy == Ordering::Greater && yz == Ordering::Greater) REQUIRE(xz == Ordering::Greater);
    }
}

TEST_CASE("exact square roots inside quadratic fields") {
    // sqrt((6-3*sqrt3)/2) = (3-sqrt3)/2
    Scalar x = Scalar(Surd(6, -3, 3, 2));
    Scalar r = x.sqrt();
    REQUIRE(r.is_surd());
    CHECK(r.surd().equals(Surd(3, -1, 3, 2)));
    CHECK(compare(r * r, x) == Ordering::Equal);

    CHECK(Scalar(mpq_class(9, 4)).sqrt().rational() == mpq_class(3, 2));
    Scalar s2 = Scalar(2).sqrt();
    REQUIRE(s2.is_surd());
    CHECK(s2.surd().equals(Surd(0, 1, 2, 1)));
    CHECK(Scalar(mpq_class(1, 2)).sqrt().is_surd());  // sqrt(1/2) = sqrt(2)/2
    CHECK(compare(Scalar(mpq_class(1, 2)).sqrt() * Scalar(mpq_class(1, 2)).sqrt(), Scalar(mpq_class(1, 2))) ==
          Ordering::Equal);
}

TEST_CASE("scalar arithmetic degrades to sound enclosures across fields") {
    Scalar x = Scalar(Surd(0, 1, 2, 1)) * Scalar(Surd(0, 1, 3, 1));  // sqrt 6
    CHECK(!x.is_exact());
    Interval e = refine(x, -60);
    Interval s6 = Scalar(Surd(0, 1, 6, 1)).enclosure(128);
    CHECK(!iv::disjoint(e, s6));
    // floor through the approximate path
    CHECK(x.floor() == 2);
}

TEST_CASE("surd floor handles negative values") {
    CHECK(Surd(0, 1, 2, 1).floor() == 1);
    CHECK(Surd(0, -1, 2, 1).floor() == -2);
    CHECK(Surd(1, 1, 5, 2).floor() == 1);   // golden ratio
    CHECK(Surd(-1, 1, 5, 2).floor() == 0);  // golden conjugate
    CHECK(Surd(7, -2, 2, 3).floor() == 1);  // (7-2sqrt2)/3 = 1.390
}
