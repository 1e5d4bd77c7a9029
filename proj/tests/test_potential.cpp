#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fpconv/errors.hpp"
#include "fpconv/freeconv.hpp"
#include "fpconv/measure.hpp"
#include "fpconv/potential.hpp"

using namespace fpconv;

TEST_CASE("direct log potential") {
    CHECK(u_direct(Measure::point_mass(0.0), -3.0) == doctest::Approx(std::log(3.0)));
    CHECK(u_direct(Measure::semicircle(1.0), -1e6) - std::log(1e6) ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(u_direct(Measure::semicircle(1.0), 0.0), InsideSupport);
    CHECK_THROWS_AS(u_direct(Measure::semicircle(1.0), 5.0), InsideSupport);
}

TEST_CASE("energy values against hand-minimized closed forms") {
    // mu = sc(1), nu = point mass at 0, z = -3:
    //   E(g) = g^2/2 + log(3 - g), minimized at g = (3 - sqrt(5))/2.
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const double g0 = (3.0 - std::sqrt(5.0)) / 2.0;
    const double e0 = g0 * g0 / 2.0 + std::log(3.0 - g0);
    CHECK(e_value(fc, -3.0, g0) == doctest::Approx(e0).epsilon(1e-14));
    CHECK(e0 == doctest::Approx(1.0353726669943646).epsilon(1e-12));

    // The direct quadrature of the convolved law must agree: sc + delta_0
    // leaves the measure unchanged.
    CHECK(u_direct(Measure::semicircle(1.0), -3.0) == doctest::Approx(e0).epsilon(1e-9));

    // mu = mp(1), nu = delta_0, z = -1, g = 1:
    //   E = (log 2 - 1/2) + log(1 + 1/2).
    FreeConvolution mp(Measure::marchenko_pastur(1.0), Measure::point_mass(0.0));
    const double e_mp = (std::log(2.0) - 0.5) + std::log(1.5);
    CHECK(e_value(mp, -1.0, 1.0) == doctest::Approx(e_mp).epsilon(1e-14));
    CHECK(e_mp == doctest::Approx(0.5986122886681098).epsilon(1e-12));

    CHECK_THROWS_AS(e_value(fc, -3.0, 3.5), OutOfDomain); // z - R(-g) = 0.5 > supp_- nu
}

TEST_CASE("energy at g -> 0 reduces to the shifted direct potential") {
    // First term vanishes; the log term becomes U_nu(z - R_mu(0)).
    FreeConvolution fc(Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0));
    CHECK(e_value(fc, -3.0, 1e-10) ==
          doctest::Approx(u_direct(Measure::two_atoms(-1.0, 1.0), -3.0)).epsilon(1e-8));

    // Nonzero mean mu shifts the argument.
    FreeConvolution mp(Measure::marchenko_pastur(1.0), Measure::point_mass(0.0));
    CHECK(e_value(mp, -1.0, 1e-10) ==
          doctest::Approx(u_direct(Measure::point_mass(0.0), -1.0 - 1.0)).epsilon(1e-8));
}

TEST_CASE("energy derivative: sign, root, finite differences") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    // Hand value at g = 0.1: 1 * (0.1 - 1/(3 - 0.1)).
    CHECK(e_deriv(fc, -3.0, 0.1) == doctest::Approx(0.1 - 1.0 / 2.9).epsilon(1e-14));
    CHECK(e_deriv(fc, -3.0, 0.1) < 0.0);

    const double g_root = fc.stieltjes(-3.0).g;
    CHECK(std::fabs(e_deriv(fc, -3.0, g_root)) <= 1e-9);

    // Numeric first term: two-point mu exercises the Gauss-Legendre path.
    FreeConvolution two(Measure::two_atoms(-1.0, 1.0), Measure::point_mass(0.0));
    for (double g : {0.2, 0.8, 2.0}) {
        const double h = 1e-6;
        const double fd = (e_value(two, -2.0, g + h) - e_value(two, -2.0, g - h)) / (2.0 * h);
        CHECK(e_deriv(two, -2.0, g) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("variational potential equals the direct quadrature") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const auto res = fc.summary();
    (void)res;
    const auto pot = u_variational(fc, -3.0);
    CHECK(pot.u == doctest::Approx(1.0353726669943646).epsilon(1e-10));
    CHECK(pot.minimizer_g == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-10));
    CHECK(std::fabs(pot.u - pot.e_at_min) <= 1e-9);
    CHECK(pot.fixed_point_residual <= 1e-9);

    // Additivity oracle.
    FreeConvolution fc2(Measure::semicircle(1.0), Measure::semicircle(1.0));
    const double direct = u_direct(Measure::semicircle(std::sqrt(2.0)), -3.0);
    CHECK(u_variational(fc2, -3.0).u == doctest::Approx(direct).epsilon(1e-9));

    CHECK_THROWS_AS(u_variational(fc, -1.5), BeyondEdge);
    CHECK_THROWS_AS(u_variational(Measure::point_mass(0.0), Measure::semicircle(1.0), -9.0),
                    DegenerateMeasure);
}

TEST_CASE("potential asymptotics and z-derivative") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0));
    CHECK(u_variational(fc, -1e4).u - std::log(1e4) == doctest::Approx(0.0).epsilon(1e-6));

    const double zs = fc.summary().z_star;
    for (double z : {zs - 2.0, zs - 0.7, zs - 0.25}) {
        const double h = 1e-5;
        const double du = (u_variational(fc, z + h).u - u_variational(fc, z - h).u) / (2.0 * h);
        CHECK(du == doctest::Approx(-fc.stieltjes(z).g).epsilon(1e-6));
    }
}

TEST_CASE("bounded minimization ignores the lower spur beyond g_star") {
    // nu with two nearby atoms: E plunges to -inf at the right end of its
    // domain, but the minimizer inside (0, g_star) is the potential.
    FreeConvolution fc(Measure::semicircle(1.0), Measure::two_atoms(-1.17, -0.17));
    const double z = -2.95;
    REQUIRE(z < fc.summary().z_star);
    const auto pot = u_variational(fc, z);
    CHECK(pot.minimizer_g > 0.0);
    CHECK(pot.minimizer_g < fc.summary().g_star);

    const double e_hi = fc.e_domain_upper(z);
    const double e_far = e_value(fc, z, e_hi - 1e-8 * e_hi);
    CHECK(e_far < pot.u - 1.0); // far lower than the true potential
}

TEST_CASE("profiles: curves, annotations, CSV") {
    const Measure sc = Measure::semicircle(1.0);
    const Measure d0 = Measure::point_mass(0.0);

    // F profile of sc + delta_0 is h + 1/h with its maximum at (-1, -2).
    const auto f_table =
        emit_profile(sc, d0, std::nullopt, ProfileKind::FProfile, GridSpec{-4.0, -0.1, 79});
    for (std::size_t i = 0; i < f_table.abscissa.size(); ++i) {
        const double h = f_table.abscissa[i];
        CHECK(f_table.value[i] == doctest::Approx(h + 1.0 / h).epsilon(1e-11));
    }
    REQUIRE(f_table.annotations.size() == 1);
    CHECK(f_table.annotations[0].abscissa == doctest::Approx(-1.0));
    CHECK(f_table.annotations[0].value == doctest::Approx(-2.0));

    // Extended inverse profile is -g - 1/g with the edge annotated at (1, -2).
    const auto ginv =
        emit_profile(sc, d0, std::nullopt, ProfileKind::GInvProfile, GridSpec{0.05, 3.0, 60});
    for (std::size_t i = 0; i < ginv.abscissa.size(); ++i) {
        const double g = ginv.abscissa[i];
        CHECK(ginv.value[i] == doctest::Approx(-g - 1.0 / g).epsilon(1e-11));
    }
    REQUIRE(ginv.annotations.size() == 1);
    CHECK(ginv.annotations[0].abscissa == doctest::Approx(1.0));
    CHECK(ginv.annotations[0].value == doctest::Approx(-2.0));
    CHECK(ginv.annotations[0].kind == "g_star");

    // E profile values are e_value pointwise; annotations sit on the curve.
    FreeConvolution fc(sc, d0);
    const auto e_table = emit_profile(sc, d0, -2.5, ProfileKind::EProfile, GridSpec{0.05, 2.2, 44});
    for (std::size_t i = 0; i < e_table.abscissa.size(); ++i)
        CHECK(e_table.value[i] ==
              doctest::Approx(e_value(fc, -2.5, e_table.abscissa[i])).epsilon(1e-12));
    REQUIRE(e_table.annotations.size() == 2);
    for (const auto& a : e_table.annotations)
        CHECK(a.value == doctest::Approx(e_value(fc, -2.5, a.abscissa)).epsilon(1e-8));

    // Grid entirely outside the domain.
    CHECK_THROWS_AS(
        emit_profile(sc, d0, -2.5, ProfileKind::EProfile, GridSpec{5.0, 6.0, 10}),
        OutOfDomain);
    CHECK_THROWS_AS(emit_profile(sc, d0, std::nullopt, ProfileKind::EProfile, std::nullopt),
                    ConfigError);

    // CSV round trip at 17 significant digits.
    const auto dir = std::filesystem::temp_directory_path() / "fpconv_profile_test";
    const auto paths = write_profile_csv(f_table, dir.string(), "unit-test");
    std::ifstream in(paths.first);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "abscissa,value");
    const auto comma = first.find(',');
    CHECK(std::stod(first.substr(0, comma)) == f_table.abscissa[0]);
    CHECK(std::stod(first.substr(comma + 1)) == f_table.value[0]);
    std::ifstream ann(paths.second);
    std::getline(ann, header);
    CHECK(header == "abscissa,value,kind");
}

TEST_CASE("shared pipeline objects evaluate identically across threads") {
    FreeConvolution fc(Measure::semicircle(1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5));
    const double zs = fc.summary().z_star;
    std::vector<double> zv;
    for (int i = 0; i < 16; ++i) zv.push_back(zs - 0.3 - 0.1 * i);
    std::vector<double> serial;
    for (double z : zv) serial.push_back(u_variational(fc, z).u);
    std::vector<double> parallel(zv.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < 4; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < zv.size(); i += 4)
                parallel[i] = u_variational(fc, zv[i]).u;
        });
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < zv.size(); ++i) CHECK(parallel[i] == serial[i]);
}

TEST_CASE("extended verification window still lands on the minimizer") {
    // R'_sc > 0 everywhere, so the window may stretch toward the second
    // root image; the minimum inside it is unchanged.
    FreeConvolution fc(Measure::semicircle(1.0), Measure::point_mass(0.0));
    const auto narrow = u_variational(fc, -2.5, false);
    const auto wide = u_variational(fc, -2.5, true);
    CHECK(wide.u == doctest::Approx(narrow.u).epsilon(1e-12));
    CHECK(wide.minimizer_g == doctest::Approx(narrow.minimizer_g).epsilon(1e-9));
    CHECK(std::fabs(wide.u - wide.e_at_min) <= 1e-9);
}
