#include <doctest.h>

#include <cmath>

#include "fpconv/errors.hpp"
#include "fpconv/freeconv.hpp"
#include "fpconv/measure.hpp"

using namespace fpconv;

TEST_CASE("F values and derivatives on closed-form cases") {
    // mu semicircle, nu a point mass: F(h) = h - G_nu(h) = h + 1/h on h < 0.
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    CHECK(fc.f_value(-1.0) == doctest::Approx(-2.0));
    CHECK(fc.f_deriv(-1.0) == doctest::Approx(0.0));
    CHECK(fc.f_value(-1e6) == doctest::Approx(-1e6).epsilon(1e-3));
    CHECK(fc.f_deriv(-1e6) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(fc.f_value(0.5), OutOfDomain);

    // mu Marchenko-Pastur(1): F(h) = h + 1/(1 + G_nu(h)).
    FreeConvolution mp(Measure::marchenko_pastur(1.0), Measure::point_mass(0.0));
    CHECK(mp.f_value(-1.0) == doctest::Approx(-0.5));

    // Central differences across families.
    FreeConvolution mixed(Measure::two_atoms(-1.0, 1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5));
    for (double h : {-6.0, -2.5, -1.4}) {
        const double step = 1e-6;
        const double fd = (mixed.f_value(h + step) - mixed.f_value(h - step)) / (2.0 * step);
        CHECK(mixed.f_deriv(h) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("endpoint summary: semicircle plus point mass") {
    const auto sm = endpoint_summary(Measure::semicircle(1.0), Measure::point_mass(0.0));
    CHECK(sm.h_star == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sm.g_star == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sm.z_star == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(sm.h_star_kind == HStarKind::CriticalPoint);
}

TEST_CASE("endpoint summary: two semicircle laws combine by root-sum-square") {
    const auto sm = endpoint_summary(Measure::semicircle(1.0), Measure::semicircle(1.0));
    const double b = std::sqrt(2.0);
    CHECK(sm.h_star == doctest::Approx(-3.0 / b).epsilon(1e-11));
    CHECK(sm.g_star == doctest::Approx(1.0 / b).epsilon(1e-11));
    CHECK(sm.z_star == doctest::Approx(-2.0 * b).epsilon(1e-11));
}

TEST_CASE("endpoint summary: hard edge keeps the domain endpoint") {
    const auto sm = endpoint_summary(Measure::marchenko_pastur(1.0), Measure::point_mass(0.0));
    CHECK(sm.h_star == doctest::Approx(0.0));
    CHECK(std::isinf(sm.g_star));
    CHECK(sm.z_star == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sm.h_star_kind == HStarKind::DomainEndpoint);

    // Symmetric two-point nu with an atom on its lower edge.
    const auto sm2 =
        endpoint_summary(Measure::marchenko_pastur(0.5), Measure::two_atoms(-1.0, 1.0));
    CHECK(sm2.h_star_kind == HStarKind::DomainEndpoint);
    CHECK(sm2.z_star == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("endpoint summary: dom(F) capped by the mu transform domain") {
    // Jacobi(2,2) on [-1,1] has finite g_star and g_star_prime; its dhat
    // caps dom(F) at h with G_nu(h) = g_star(mu), i.e. h = -1/1.25 = -0.8.
    // Convolving with a point mass leaves the measure in place, so the
    // edge must come out as -1 even though F has no critical point.
    const Measure mu = Measure::jacobi(-1.0, 1.0, 2.0, 2.0);
    FreeConvolution fc(mu, Measure::point_mass(0.0));
    CHECK(fc.summary().f_domain_upper == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(fc.summary().h_star_kind == HStarKind::DomainEndpoint);
    CHECK(fc.summary().z_star == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(fc.summary().g_star == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("endpoint consistency: z_star is the supremum of F over the increasing part") {
    for (const auto& [mu, nu] :
         std::vector<std::pair<Measure, Measure>>{
             {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
             {Measure::marchenko_pastur(2.0), Measure::point_mass(0.0)},
             {Measure::semicircle(0.7), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)}}) {
        FreeConvolution fc(mu, nu);
        const auto& sm = fc.summary();
        double sup = -1e300;
        // Dense grid accumulating toward h_star resolves the quadratic top.
        for (int i = 0; i <= 2000; ++i) {
            const double h = sm.h_star - 5.0 * std::pow(1e-8, i / 2000.0);
            if (!fc.f_contains(h)) continue;
            sup = std::max(sup, fc.f_value(h));
        }
        CHECK(sup <= sm.z_star + 1e-10);
        CHECK(sm.z_star - sup <= 1e-8);
    }
}

TEST_CASE("monotone scan soundness: F' positive left of h_star") {
    for (const auto& [mu, nu] :
         std::vector<std::pair<Measure, Measure>>{
             {Measure::semicircle(1.0), Measure::point_mass(0.0)},
             {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
             {Measure::marchenko_pastur(1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)},
             {Measure::two_atoms(-1.0, 1.0), Measure::two_atoms(-1.0, 1.0)}}) {
        FreeConvolution fc(mu, nu);
        const double hs = fc.summary().h_star;
        for (int i = 0; i < 1000; ++i) {
            const double h = hs - 1e-6 * std::pow(3e7, i / 999.0); // (hs-30, hs-1e-6]
            if (!fc.f_contains(h)) continue;
            CHECK(fc.f_deriv(h) > 0.0);
        }
    }
}

TEST_CASE("F' strictly decreasing for semicircle and Marchenko-Pastur mu") {
    for (const auto& [mu, nu] :
         std::vector<std::pair<Measure, Measure>>{
             {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
             {Measure::marchenko_pastur(0.5), Measure::two_atoms(-1.0, 1.0)},
             {Measure::marchenko_pastur(2.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)}}) {
        FreeConvolution fc(mu, nu);
        const double upper = fc.summary().f_domain_upper;
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000; ++i) {
            const double h = upper - 20.0 * std::pow(5e-5, i / 999.0);
            if (!fc.f_contains(h)) continue;
            const double fp = fc.f_deriv(h);
            CHECK(fp < prev);
            prev = fp;
        }
    }
}

TEST_CASE("convolution Stieltjes transform via the leftmost root") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const auto root = fc.stieltjes(-2.5);
    CHECK(root.g == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(root.h_less == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(root.fixed_point_residual <= 1e-9);

    // Additivity oracle: sc(1) boxplus sc(1) = sc(sqrt 2), whose transform
    // at -3 is (3 - sqrt(9 - 8)) / 4 = 1/2.
    FreeConvolution fc2(Measure::semicircle(1.0), Measure::semicircle(1.0));
    CHECK(fc2.stieltjes(-3.0).g == doctest::Approx(0.5).epsilon(1e-11));

    CHECK_THROWS_AS(fc.stieltjes(-2.0), BeyondEdge);
    CHECK_THROWS_AS(fc.stieltjes(-1.0), BeyondEdge);
}

TEST_CASE("fixed point residual stays small near the edge") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0));
    const double zs = fc.summary().z_star;
    for (double dz : {3.0, 0.5, 1e-2, 1e-4, 1e-6}) {
        const auto root = fc.stieltjes(zs - dz);
        CHECK(root.fixed_point_residual <= 1e-9);
    }
}

TEST_CASE("second root of F(h) = z") {
    // h + 1/h = -2.5 has roots -2 and -1/2; the second from the left is -1/2.
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const auto hg = fc.h_greater(-2.5);
    REQUIRE(hg.has_value());
    CHECK(*hg == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK_THROWS_AS(fc.h_greater(-2.0), BeyondEdge);

    FreeConvolution fc2(Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0));
    const double z = -3.0;
    const auto hg2 = fc2.h_greater(z);
    REQUIRE(hg2.has_value());
    CHECK(*hg2 > fc2.summary().h_star);
    CHECK(fc2.f_value(*hg2) == doctest::Approx(z).epsilon(1e-10));

    // Hard edge: F is increasing on all of dom(F); no second root.
    FreeConvolution fc3(Measure::marchenko_pastur(1.0), Measure::point_mass(0.0));
    CHECK_FALSE(fc3.h_greater(-1.0).has_value());
}

TEST_CASE("critical point classification across the edge") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const double zs = fc.summary().z_star;

    CHECK(fc.classify(zs + 0.3).points.empty());

    const auto at_edge = fc.classify(zs);
    REQUIRE(at_edge.points.size() == 1);
    CHECK(at_edge.points[0].kind == CriticalKind::Inflection);
    CHECK(at_edge.points[0].g == doctest::Approx(fc.summary().g_star).epsilon(1e-9));

    const auto below = fc.classify(-2.5);
    REQUIRE(below.points.size() == 2);
    CHECK(below.points[0].kind == CriticalKind::LocalMin);
    CHECK(below.points[0].g == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(below.points[1].kind == CriticalKind::LocalMax);
    CHECK(below.points[1].g == doctest::Approx(2.0).epsilon(1e-9)); // G_nu(-1/2) = 2
    CHECK(below.points[1].g > fc.summary().g_star);
}

TEST_CASE("degenerate mu is rejected, degenerate nu is fine") {
    CHECK_THROWS_AS(FreeConvolution(Measure::point_mass(0.0), Measure::semicircle(1.0)),
                    DegenerateMeasure);
    CHECK_NOTHROW(FreeConvolution(Measure::semicircle(1.0), Measure::point_mass(3.0)));
}

TEST_CASE("point mass in nu shifts the edge") {
    for (double a : {-2.0, 0.0, 1.5}) {
        const auto sm = endpoint_summary(Measure::semicircle(1.0), Measure::point_mass(a));
        CHECK(sm.z_star == doctest::Approx(a - 2.0).epsilon(1e-10));
    }
}

TEST_CASE("support width sandwich for symmetric pairs") {
    for (const auto& [mu, nu] :
         std::vector<std::pair<Measure, Measure>>{
             {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
             {Measure::semicircle(1.0), Measure::semicircle(0.5)},
             {Measure::two_atoms(-1.0, 1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)}}) {
        const auto sm = endpoint_summary(mu, nu);
        const double w = 2.0 * std::fabs(sm.z_star);
        CHECK(w >= std::max(mu.support().width(), nu.support().width()));
        CHECK(w <= mu.support().width() + nu.support().width());
    }
}
