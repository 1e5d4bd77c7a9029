#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fpconv/eigen_sym.hpp"
#include "fpconv/errors.hpp"
#include "fpconv/freeconv.hpp"
#include "fpconv/measure.hpp"
#include "fpconv/montecarlo.hpp"
#include "fpconv/potential.hpp"
#include "fpconv/rng.hpp"

using namespace fpconv;

TEST_CASE("eigensolver: tridiagonal Toeplitz spectrum") {
    const int n = 50;
    const double a = 0.3, b = -1.1;
    std::vector<double> mat(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        mat[i * n + i] = a;
        if (i + 1 < n) mat[i * n + i + 1] = mat[(i + 1) * n + i] = b;
    }
    const auto eig = symmetric_eigenvalues(std::move(mat), n);
    std::vector<double> expect;
    for (int k = 1; k <= n; ++k) expect.push_back(a + 2.0 * b * std::cos(k * M_PI / (n + 1.0)));
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < n; ++i) CHECK(eig[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("eigensolver: trace and Frobenius identities on a random matrix") {
    const int n = 64;
    CounterRng rng(5u, 0u);
    std::vector<double> mat(n * n);
    double trace = 0.0, frob = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.next_gaussian();
            mat[i * n + j] = mat[j * n + i] = v;
        }
    for (int i = 0; i < n; ++i) {
        trace += mat[i * n + i];
        for (int j = 0; j < n; ++j) frob += mat[i * n + j] * mat[i * n + j];
    }
    const auto eig = symmetric_eigenvalues(std::move(mat), n);
    CHECK(std::accumulate(eig.begin(), eig.end(), 0.0) == doctest::Approx(trace).epsilon(1e-11));
    double sq = 0.0;
    for (double l : eig) sq += l * l;
    CHECK(sq == doctest::Approx(frob).epsilon(1e-11));
}

TEST_CASE("eigensolver: 2x2 closed form") {
    std::vector<double> m = {2.0, 3.0, 3.0, -1.0};
    const auto eig = symmetric_eigenvalues(std::move(m), 2);
    const double disc = std::sqrt(1.5 * 1.5 + 9.0);
    CHECK(eig[0] == doctest::Approx(0.5 - disc));
    CHECK(eig[1] == doctest::Approx(0.5 + disc));
}

TEST_CASE("counter rng: determinism and stream separation") {
    CounterRng a(123u, 7u), b(123u, 7u), c(123u, 8u);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
        all_equal = all_equal && (x == y);
        any_diff = any_diff || (x != z);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("counter rng: gaussian moments") {
    CounterRng rng(2024u, 0u);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.next_gaussian();
        s1 += v;
        s2 += v * v;
    }
    CHECK(std::fabs(s1 / n) < 0.01);
    CHECK(std::fabs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("sample_spectrum: determinism and edge bracket") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::Goe;
    spec.beta = 1.0;
    spec.nu = Measure::point_mass(0.0);
    spec.n = 16;
    spec.trials = 100;
    spec.seed = 31337u;

    const auto s0 = sample_spectrum(spec, 3);
    const auto s1 = sample_spectrum(spec, 3);
    CHECK(s0.eigenvalues == s1.eigenvalues);

    for (int t = 0; t < spec.trials; ++t) {
        const auto s = sample_spectrum(spec, t);
        CHECK(s.eigenvalues.front() > -3.0);
        CHECK(s.eigenvalues.front() < 0.0);
        CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
        CHECK(s.eigenvalues.size() == 16);
    }
    CHECK_THROWS_AS(sample_spectrum(spec, 100), ConfigError);
}

TEST_CASE("mean eigenvalue tracks the nu mean") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::Goe;
    spec.beta = 1.0;
    spec.nu = Measure::two_atoms(0.0, 1.0);
    spec.n = 256;
    spec.trials = 4;
    spec.seed = 99u;
    for (int t = 0; t < spec.trials; ++t) {
        const auto s = sample_spectrum(spec, t);
        const double mean =
            std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0) / spec.n;
        CHECK(std::fabs(mean - moment(spec.nu, 1)) < 5.0 / std::sqrt(256.0));
    }
}

TEST_CASE("wishart spectra land on the Marchenko-Pastur edges") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::Wishart;
    spec.beta = 1.0;
    spec.nu = Measure::point_mass(0.0);
    spec.n = 256;
    spec.trials = 3;
    spec.seed = 5u;
    for (int t = 0; t < spec.trials; ++t) {
        const auto s = sample_spectrum(spec, t);
        CHECK(s.eigenvalues.front() >= 0.0); // Gram matrix
        CHECK(s.eigenvalues.front() < 0.05); // hard edge at the origin
        CHECK(std::fabs(s.eigenvalues.back() - 4.0) < 0.5);
        const double mean =
            std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0) / spec.n;
        CHECK(std::fabs(mean - 1.0) < 0.2);
    }

    spec.beta = 2.0;
    for (int t = 0; t < spec.trials; ++t) {
        const auto s = sample_spectrum(spec, t);
        const double lm = (1.0 - std::sqrt(2.0)) * (1.0 - std::sqrt(2.0));
        CHECK(std::fabs(s.eigenvalues.front() - lm) < 0.12);
        const double mean =
            std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0) / spec.n;
        CHECK(std::fabs(mean - 2.0) < 0.3);
    }
}

TEST_CASE("empirical potential and validation") {
    EnsembleSpec spec;
    spec.nu = Measure::point_mass(0.0);
    spec.n = 64;
    spec.trials = 1;
    spec.seed = 17u;
    const auto s = sample_spectrum(spec, 0);
    const double z = s.eigenvalues.front() - 1.0;
    double expect = 0.0;
    for (double lam : s.eigenvalues) expect += std::log(lam - z);
    CHECK(empirical_potential(s, z) == doctest::Approx(expect / spec.n));
    CHECK_THROWS_AS(empirical_potential(s, s.eigenvalues.front() + 0.1), ZInsideSpectrum);

    EnsembleSpec bad = spec;
    bad.n = 8;
    CHECK_THROWS_AS(sample_spectrum(bad, 0), ResourceLimit);
    bad.n = 100000;
    CHECK_THROWS_AS(sample_spectrum(bad, 0), ResourceLimit);
}

TEST_CASE("run_ensemble: byte-identical across runs, merged by trial") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::Goe;
    spec.beta = 1.0;
    spec.nu = Measure::two_atoms(-1.0, 1.0);
    spec.n = 64;
    spec.trials = 6;
    spec.seed = 2718u;
    const auto r1 = run_ensemble(spec, -4.0);
    const auto r2 = run_ensemble(spec, -4.0);
    REQUIRE(r1.rows.size() == 6);
    for (int t = 0; t < 6; ++t) {
        CHECK(r1.rows[t].trial == t);
        CHECK(r1.rows[t].min_eig == r2.rows[t].min_eig);
        CHECK(r1.rows[t].potential_at_z == r2.rows[t].potential_at_z);
    }
}

TEST_CASE("empirical potential converges to the variational value") {
    const Measure nu = Measure::two_atoms(-1.0, 1.0);
    FreeConvolution fc(Measure::semicircle(1.0), nu);
    const double z = fc.summary().z_star - 0.5;
    const double predicted = u_variational(fc, z).u;

    double err_small = 0.0, err_large = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        EnsembleSpec spec;
        spec.kind = EnsembleKind::Goe;
        spec.beta = 1.0;
        spec.nu = nu;
        spec.n = pass == 0 ? 128 : 512;
        spec.trials = 4;
        spec.seed = 424242u;
        const auto run = run_ensemble(spec, z);
        const double err = std::fabs(run.potential_mean - predicted);
        (pass == 0 ? err_small : err_large) = err;
    }
    CHECK(err_large < err_small);
    CHECK(err_large < 0.02);
}
