#include <doctest.h>

#include <cmath>

#include "fpconv/errors.hpp"
#include "fpconv/measure.hpp"
#include "fpconv/rng.hpp"
#include "fpconv/rtransform.hpp"

using namespace fpconv;

namespace {

// Closed form for the symmetric two-point measure at +-1, derived from
// inverting G(z) = z / (1 - z^2):
//   R(t) = (sqrt(1 + 4 t^2) - 1) / (2 t).
double r_two_point(double t) { return (std::sqrt(1.0 + 4.0 * t * t) - 1.0) / (2.0 * t); }

} // namespace

TEST_CASE("closed forms: semicircle and marchenko-pastur") {
    RTransformReal sc(Measure::semicircle(2.0));
    CHECK(sc.value(0.7) == doctest::Approx(0.7 * 4.0));
    CHECK(sc.value(5.0) == doctest::Approx(20.0));
    CHECK(sc.deriv(-3.0) == doctest::Approx(4.0));
    CHECK(sc.extended_domain().has_value());
    CHECK(sc.dhat().lo == doctest::Approx(-0.5));
    CHECK(sc.dhat().hi == doctest::Approx(0.5));

    RTransformReal mp(Measure::marchenko_pastur(0.5));
    CHECK(mp.value(0.0) == doctest::Approx(0.5)); // the mean
    CHECK(mp.value(-1.0) == doctest::Approx(0.25));
    CHECK(mp.deriv(0.5) == doctest::Approx(0.5 / 0.25));
    CHECK(mp.domain().hi == doctest::Approx(1.0));
    CHECK_THROWS_AS(mp.value(1.5), OutOfDomain);
}

TEST_CASE("numeric path against hand closed forms") {
    // Two-point measure: dhat is all of R (both edges carry atoms).
    RTransformReal two(Measure::two_atoms(-1.0, 1.0));
    CHECK(std::isinf(two.dhat().lo));
    CHECK(std::isinf(two.dhat().hi));
    CHECK_FALSE(two.extended_domain().has_value());
    for (double t : {-3.0, -0.7, -0.1, -0.004, 0.004, 0.25, 2.0}) {
        CHECK(two.value(t) == doctest::Approx(r_two_point(t)).epsilon(1e-9));
        const double h = 1e-6 * std::max(1.0, std::fabs(t));
        const double fd = (two.value(t + h) - two.value(t - h)) / (2.0 * h);
        CHECK(two.deriv(t) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(two.value(0.0) == doctest::Approx(0.0)); // symmetric: zero mean

    // Jacobi(1/2,1/2) on [-1,1] equals the semicircle with beta = 1/2, so
    // its numeric R must be t/4 on dhat = (-2, 2).
    RTransformReal jac(Measure::jacobi(-1.0, 1.0, 0.5, 0.5));
    CHECK(jac.dhat().lo == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(jac.dhat().hi == doctest::Approx(2.0).epsilon(1e-12));
    for (double t : {-1.9, -1.0, -0.05, -0.002, 0.0015, 0.4, 1.5}) {
        CHECK(jac.value(t) == doctest::Approx(0.25 * t).epsilon(1e-9));
        CHECK(jac.deriv(t) == doctest::Approx(0.25).epsilon(1e-7));
    }
    CHECK_THROWS_AS(jac.value(2.3), OutOfDomain);
}

TEST_CASE("removable singularity at t = 0") {
    RTransformReal two(Measure::two_atoms(0.0, 1.0)); // numeric path, nonzero mean
    // Cumulant series endpoints: value -> mean, derivative -> variance.
    CHECK(two.value(0.0) == doctest::Approx(0.5));
    CHECK(two.deriv(0.0) == doctest::Approx(0.25));
    // Continuity across the series / direct blend.
    for (double t : {-2.5e-3, -1.5e-3, -9e-4, 9e-4, 1.5e-3, 2.5e-3}) {
        const double h = 1e-4;
        const double left = two.value(t - h);
        const double mid = two.value(t);
        const double right = two.value(t + h);
        CHECK(std::fabs(mid - 0.5 * (left + right)) < 1e-7); // no jump at the seams
    }
}

TEST_CASE("derivative positive across dhat") {
    CounterRng rng(11u, 5u);
    for (const Measure& m :
         {Measure::semicircle(1.0), Measure::marchenko_pastur(0.7),
          Measure::marchenko_pastur(2.5), Measure::two_atoms(-1.0, 1.0),
          Measure::jacobi(-1.0, 1.0, 0.5, 0.5), Measure::jacobi(0.0, 1.0, 1.5, 0.25)}) {
        RTransformReal rt(m);
        const double lo = std::isfinite(rt.dhat().lo) ? rt.dhat().lo : -50.0;
        const double hi = std::isfinite(rt.dhat().hi) ? rt.dhat().hi : 50.0;
        for (int i = 0; i < 1000; ++i) {
            const double t = lo + (hi - lo) * (0.0005 + 0.999 * rng.next_double());
            CHECK(rt.deriv(t) > 0.0);
            CHECK(rt.d_plus_contains(t));
        }
    }
}

TEST_CASE("d_plus membership for the extended domains") {
    RTransformReal sc(Measure::semicircle(1.0));
    CHECK(sc.d_plus_contains(5.0));
    RTransformReal mp(Measure::marchenko_pastur(1.0));
    CHECK(mp.d_plus_contains(0.99));
    CHECK_FALSE(mp.d_plus_contains(1.0));
    CHECK_FALSE(mp.d_plus_contains(2.0));
}

TEST_CASE("closed forms against the inversion route") {
    // R(t) = Ginv(-t) - 1/t with the inverse found by bisection on G: an
    // independent route to the same function for the closed-form families.
    for (const Measure& m : {Measure::semicircle(1.4), Measure::marchenko_pastur(0.6),
                             Measure::marchenko_pastur(2.0)}) {
        RTransformReal rt(m);
        const auto e = edge_data(m);
        const double lo = std::isfinite(e.g_star) ? -0.95 * e.g_star : -40.0;
        for (int i = 1; i <= 12; ++i) {
            const double t = lo * i / 12.0; // t in dhat, negative side
            const double g = -t;
            double za = m.support().lower - 1e-9, zb = za;
            while (g_value(m, zb) > g) zb -= std::max(1.0, std::fabs(zb)); // bracket left
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (za + zb);
                (g_value(m, mid) > g ? za : zb) = mid;
            }
            const double r_via_inverse = 0.5 * (za + zb) + 1.0 / g;
            CHECK(rt.value(t) == doctest::Approx(r_via_inverse).epsilon(1e-9));
        }
    }
}
