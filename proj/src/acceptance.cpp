#include "fpconv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "fpconv/errors.hpp"
#include "fpconv/freeconv.hpp"
#include "fpconv/measure.hpp"
#include "fpconv/montecarlo.hpp"
#include "fpconv/potential.hpp"
#include "fpconv/rng.hpp"
#include "fpconv/stieltjes.hpp"

namespace fpconv::acceptance {

namespace {

struct Check {
    bool pass = true;
    double worst = 0.0;        // largest error seen
    std::string note;

    void track(double err, bool ok) {
        worst = std::max(worst, err);
        pass = pass && ok;
    }
    void require(bool ok, const std::string& why) {
        if (!ok && note.empty()) note = why;
        pass = pass && ok;
    }
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1.0));
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

using Clock = std::chrono::steady_clock;

// ---- criterion 1: semicircle self-consistency --------------------------

Check criterion1(double tol) {
    Check c;
    for (double beta : {0.5, 1.0, 2.0}) {
        const Measure mu = Measure::semicircle(beta);
        FreeConvolution fc(mu, Measure::point_mass(0.0));
        const double zs = fc.summary().z_star;
        c.require(std::fabs(zs + 2.0 * beta) < 1e-9, "edge of sc+delta0 is not -2 beta");
        for (double z : linspace(zs - 4.0, zs - 1e-3, 50)) {
            const double err = std::fabs(u_variational(fc, z).u - u_direct(mu, z));
            c.track(err, err <= tol);
        }
    }
    return c;
}

// ---- criterion 2: semicircle additivity oracle -------------------------

Check criterion2(double tol) {
    Check c;
    const std::vector<std::pair<double, double>> pairs = {{1.0, 1.0}, {0.5, 2.0}};
    for (auto [b1, b2] : pairs) {
        const double b = std::sqrt(b1 * b1 + b2 * b2);
        FreeConvolution fc(Measure::semicircle(b1), Measure::semicircle(b2));
        const auto& sm = fc.summary();
        // Combined law is the semicircle with the root-sum-square radius:
        // z* = -2b, g* = 1/b, h* = Ginv_{sc(b2)}(1/b) = -b2^2/b - b.
        c.track(std::fabs(sm.z_star + 2.0 * b), std::fabs(sm.z_star + 2.0 * b) <= tol);
        c.track(std::fabs(sm.g_star - 1.0 / b), std::fabs(sm.g_star - 1.0 / b) <= tol);
        const double h_cf = -(b2 * b2 + b * b) / b;
        c.track(std::fabs(sm.h_star - h_cf), std::fabs(sm.h_star - h_cf) <= tol);
        const Measure combined = Measure::semicircle(b);
        for (double z : linspace(sm.z_star - 4.0, sm.z_star - 1e-3, 50)) {
            const double err = std::fabs(u_variational(fc, z).u - u_direct(combined, z));
            c.track(err, err <= tol);
        }
    }
    return c;
}

// ---- criterion 3: Marchenko-Pastur shifted by a point mass -------------

Check criterion3(double tol) {
    Check c;
    for (double beta : {0.5, 1.0, 2.0}) {
        const double lower = Measure::marchenko_pastur(beta).support().lower;
        for (double a : {-1.0, 0.0, 3.0}) {
            const auto sm =
                endpoint_summary(Measure::marchenko_pastur(beta), Measure::point_mass(a));
            const double err = std::fabs(sm.z_star - (a + lower));
            c.track(err, err <= tol);
        }
    }
    return c;
}

// ---- random family pool for criteria 4 and 6 ---------------------------

Measure random_measure(CounterRng& rng, bool allow_degenerate) {
    const double pick = rng.next_double();
    if (allow_degenerate && pick < 0.2)
        return Measure::point_mass(-2.0 + 4.0 * rng.next_double());
    const double u = rng.next_double();
    if (u < 0.30) return Measure::semicircle(0.3 + 2.2 * rng.next_double());
    if (u < 0.60) return Measure::marchenko_pastur(0.3 + 2.2 * rng.next_double());
    if (u < 0.90) {
        const int k = rng.next_double() < 0.5 ? 2 : 3;
        std::vector<double> locs;
        for (int i = 0; i < k; ++i) locs.push_back(-2.0 + 4.0 * rng.next_double());
        std::sort(locs.begin(), locs.end());
        for (int i = 1; i < k; ++i) locs[i] = std::max(locs[i], locs[i - 1] + 0.15);
        std::vector<Atom> atoms;
        double mass = 0.0;
        for (int i = 0; i < k; ++i) {
            const double w = 0.2 + rng.next_double();
            atoms.push_back({locs[i], w});
            mass += w;
        }
        for (auto& a : atoms) a.weight /= mass;
        return Measure::atomic(std::move(atoms));
    }
    const double a = -1.0 - rng.next_double();
    const double b = 1.0 + rng.next_double();
    const double p = -0.4 + 2.0 * rng.next_double();
    const double q = -0.4 + 2.0 * rng.next_double();
    return Measure::jacobi(a, b, p, q);
}

// ---- criterion 4: fixed-point residual on random pairs -----------------

Check criterion4(double tol) {
    Check c;
    CounterRng rng(20240817u, 4u);
    int done = 0;
    while (done < 200) {
        const Measure mu = random_measure(rng, false);
        const Measure nu = random_measure(rng, true);
        FreeConvolution fc(std::move(mu), std::move(nu));
        const double z = fc.summary().z_star - (0.05 + 2.95 * rng.next_double());
        const double res = fc.stieltjes(z).fixed_point_residual;
        c.track(res, res <= tol);
        ++done;
    }
    return c;
}

// ---- criterion 5: critical point trichotomy ----------------------------

Check criterion5(double tol) {
    Check c;
    const std::vector<Measure> mus = {Measure::semicircle(1.0), Measure::marchenko_pastur(1.0)};
    const std::vector<Measure> nus = {Measure::point_mass(0.0), Measure::two_atoms(-1.0, 1.0),
                                      Measure::jacobi(-1.0, 1.0, 0.5, 0.5)};
    for (const auto& mu : mus) {
        for (const auto& nu : nus) {
            FreeConvolution fc(mu, nu);
            const double zs = fc.summary().z_star;
            const double gs = fc.summary().g_star;
            for (double dz : {0.05, 0.5}) {
                const auto rep = fc.classify(zs + dz);
                c.require(rep.points.empty(), "critical points found above the edge");
            }
            {
                const auto rep = fc.classify(zs, tol);
                if (std::isfinite(gs)) {
                    c.require(rep.points.size() == 1, "expected a single point at the edge");
                    if (rep.points.size() == 1) {
                        c.require(rep.points[0].kind == CriticalKind::Inflection,
                                  "edge critical point is not an inflection");
                        const double err = std::fabs(rep.points[0].g - gs);
                        c.track(err, err <= 1e-6 * std::max(1.0, gs));
                    }
                } else {
                    c.require(rep.points.empty(), "hard edge should yield no finite point");
                }
            }
            for (double dz : {0.3, 1.5}) {
                const auto rep = fc.classify(zs - dz);
                int mins_inside = 0;
                double g_min = 0.0;
                for (const auto& pt : rep.points)
                    if (pt.kind == CriticalKind::LocalMin && pt.g > 0.0 && pt.g < gs) {
                        ++mins_inside;
                        g_min = pt.g;
                    }
                c.require(mins_inside == 1, "need exactly one local minimum inside (0, g_star)");
                c.require(rep.points.size() <= 2, "more than one extra critical point");
                if (rep.points.size() == 2) {
                    const auto& extra =
                        rep.points[0].kind == CriticalKind::LocalMin ? rep.points[1] : rep.points[0];
                    c.require(extra.kind == CriticalKind::LocalMax && extra.g > g_min,
                              "extra critical point is not a local max right of the minimum");
                }
            }
        }
    }
    return c;
}

// ---- criterion 6: derivative identities ---------------------------------

Check criterion6(double tol) {
    Check c;
    // (a) dU/dz = -G along a z-grid.
    {
        const std::vector<std::pair<Measure, Measure>> pairs = {
            {Measure::semicircle(1.0), Measure::point_mass(0.0)},
            {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
            {Measure::marchenko_pastur(2.0), Measure::point_mass(0.0)}};
        for (const auto& [mu, nu] : pairs) {
            FreeConvolution fc(mu, nu);
            const double zs = fc.summary().z_star;
            for (double z : linspace(zs - 3.0, zs - 0.3, 20)) {
                const double h = 1e-5 * std::max(1.0, std::fabs(z));
                const double du =
                    (u_variational(fc, z + h).u - u_variational(fc, z - h).u) / (2.0 * h);
                const double err = std::fabs(du + fc.stieltjes(z).g);
                c.track(err, err <= tol);
            }
        }
    }
    // (b) E' against finite differences of E at random admissible (z, g).
    {
        const std::vector<std::pair<Measure, Measure>> pairs = {
            {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
            {Measure::marchenko_pastur(1.5), Measure::jacobi(0.0, 1.0, 0.5, 0.5)},
            {Measure::two_atoms(-1.0, 1.0), Measure::point_mass(0.0)}};
        CounterRng rng(20240817u, 6u);
        for (const auto& [mu, nu] : pairs) {
            FreeConvolution fc(mu, nu);
            const double zs = fc.summary().z_star;
            for (int i = 0; i < 34; ++i) {
                const double z = zs - (0.3 + 2.0 * rng.next_double());
                double hi = fc.e_domain_upper(z);
                if (!std::isfinite(hi)) hi = 4.0;
                hi = std::min(hi, fc.g_domain_upper());
                if (std::isfinite(fc.summary().g_star)) hi = std::min(hi, 2.0 * fc.summary().g_star);
                const double g = (0.05 + 0.85 * rng.next_double()) * hi;
                const double h = 1e-6 * std::max(1.0, g);
                if (g - h <= 0.0 || g + h >= hi) continue;
                const double fd = (e_value(fc, z, g + h) - e_value(fc, z, g - h)) / (2.0 * h);
                const double err = std::fabs(fd - e_deriv(fc, z, g));
                c.track(err, err <= tol * std::max(1.0, std::fabs(fd)));
            }
        }
    }
    // (c) F' against finite differences of F.
    {
        const std::vector<std::pair<Measure, Measure>> pairs = {
            {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
            {Measure::marchenko_pastur(0.5), Measure::point_mass(0.0)},
            {Measure::two_atoms(-1.0, 1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)}};
        CounterRng rng(20240817u, 66u);
        for (const auto& [mu, nu] : pairs) {
            FreeConvolution fc(mu, nu);
            const double upper = fc.summary().f_domain_upper;
            for (int i = 0; i < 34; ++i) {
                const double h = upper - (0.2 + 4.0 * rng.next_double());
                const double step = 1e-6 * std::max(1.0, std::fabs(h));
                if (!fc.f_contains(h - step) || !fc.f_contains(h + step)) continue;
                const double fd = (fc.f_value(h + step) - fc.f_value(h - step)) / (2.0 * step);
                const double err = std::fabs(fd - fc.f_deriv(h));
                c.track(err, err <= tol * std::max(1.0, std::fabs(fd)));
            }
        }
    }
    return c;
}

// ---- criterion 7: random matrix oracle ----------------------------------

Check criterion7(double edge_tol, double pot_tol) {
    Check c;
    const Measure nu = Measure::two_atoms(-1.0, 1.0);
    FreeConvolution fc(Measure::semicircle(1.0), nu);
    const double zs = fc.summary().z_star; // = -3 sqrt(3) / 2
    const double z = zs - 0.5;

    EnsembleSpec spec;
    spec.kind = EnsembleKind::Goe;
    spec.beta = 1.0;
    spec.nu = nu;
    spec.n = 1000;
    spec.trials = 20;
    spec.seed = 424242u;
    const McRun run = run_ensemble(spec, z);

    const double edge_err = std::fabs(run.edge_mean - zs);
    c.track(edge_err, edge_err <= edge_tol);
    const double pot_err = std::fabs(run.potential_mean - u_variational(fc, z).u);
    c.track(pot_err, pot_err <= pot_tol);
    c.note = "edge err " + fmt(edge_err) + ", potential err " + fmt(pot_err);
    return c;
}

// ---- criterion 8: tail normalization ------------------------------------

Check criterion8(double tol) {
    Check c;
    const std::vector<std::pair<Measure, Measure>> pairs = {
        {Measure::semicircle(1.0), Measure::point_mass(0.0)},
        {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
        {Measure::semicircle(1.0), Measure::semicircle(1.0)}};
    const double z = -1e4;
    for (const auto& [mu, nu] : pairs) {
        FreeConvolution fc(mu, nu);
        const double err = std::fabs(u_variational(fc, z).u - std::log(std::fabs(z)));
        c.track(err, err <= tol);
    }
    return c;
}

// ---- criterion 9: support width sandwich --------------------------------

Check criterion9(double /*unused*/) {
    Check c;
    // Symmetric pairs, so the convolution support is [z*, -z*].
    const std::vector<std::pair<Measure, Measure>> pairs = {
        {Measure::semicircle(1.0), Measure::two_atoms(-1.0, 1.0)},
        {Measure::semicircle(1.0), Measure::semicircle(0.5)},
        {Measure::two_atoms(-1.0, 1.0), Measure::jacobi(-1.0, 1.0, 0.5, 0.5)}};
    for (const auto& [mu, nu] : pairs) {
        const double w1 = mu.support().width();
        const double w2 = nu.support().width();
        const auto sm = endpoint_summary(mu, nu);
        const double w = 2.0 * std::fabs(sm.z_star);
        c.require(w >= std::max(w1, w2) && w <= w1 + w2,
                  "width " + fmt(w) + " outside [" + fmt(std::max(w1, w2)) + ", " +
                      fmt(w1 + w2) + "]");
    }
    return c;
}

// ---- criterion 10: profile shapes ---------------------------------------

Check criterion10(double tol, const std::string& dir) {
    Check c;
    struct Set {
        Measure mu;
        Measure nu;
        double z;
        int expect_points; // -1: only structural checks below
    };
    const Measure pm1 = Measure::two_atoms(-1.0, 1.0);
    const Measure close_atoms = Measure::two_atoms(-1.17, -0.17);
    const std::vector<Set> sets = {
        {Measure::marchenko_pastur(0.5), pm1, -1.5, 1},  // single minimum, hard edge
        {Measure::semicircle(1.0), pm1, -3.0, 2},        // minimum plus spurious maximum
        {Measure::semicircle(1.0), close_atoms, -2.95, 2},
        {Measure::semicircle(1.0), close_atoms, -2.53725, 0}, // above the edge
    };

    int idx = 0;
    for (const auto& set : sets) {
        FreeConvolution fc(set.mu, set.nu);
        const auto& sm = fc.summary();
        const auto rep = fc.classify(set.z);
        c.require(static_cast<int>(rep.points.size()) == set.expect_points,
                  "set " + std::to_string(idx) + ": expected " +
                      std::to_string(set.expect_points) + " critical points, got " +
                      std::to_string(rep.points.size()));

        if (set.expect_points >= 1 && !rep.points.empty()) {
            const auto& first = rep.points.front();
            c.require(first.kind == CriticalKind::LocalMin && first.g > 0.0 && first.g < sm.g_star,
                      "set " + std::to_string(idx) + ": leftmost point is not a min in (0, g*)");
            const double g_root = fc.stieltjes(set.z).g;
            const double err = std::fabs(first.g - g_root);
            c.track(err, err <= 1e-8 * std::max(1.0, g_root));
        }
        if (set.expect_points == 2 && rep.points.size() == 2) {
            c.require(rep.points[1].kind == CriticalKind::LocalMax && rep.points[1].g > sm.g_star,
                      "set " + std::to_string(idx) + ": second point is not a max beyond g*");
        }

        // Emit all four panels; the E annotations must mirror the report.
        const std::string token = "set" + std::to_string(idx);
        for (ProfileKind kind : {ProfileKind::EProfile, ProfileKind::FProfile,
                                 ProfileKind::GInvProfile, ProfileKind::JProfile}) {
            const auto table = emit_profile(set.mu, set.nu, set.z, kind);
            if (kind == ProfileKind::EProfile)
                c.require(table.annotations.size() == rep.points.size(),
                          "E profile annotations disagree with the classification");
            write_profile_csv(table, dir, token);
        }
        ++idx;
    }

    // Spurious-minimum guard: on set 2 the energy dives below the
    // variational value beyond g_star, and the bounded minimization must
    // still return the minimizer inside (0, g_star).
    {
        FreeConvolution fc(Measure::semicircle(1.0), close_atoms);
        const double z = -2.95;
        const auto res = u_variational(fc, z);
        c.require(res.minimizer_g > 0.0 && res.minimizer_g < fc.summary().g_star,
                  "guard: minimizer escaped (0, g_star)");
        const double e_hi = fc.e_domain_upper(z);
        const double g_far = e_hi - 1e-6 * std::max(1.0, e_hi);
        const double e_far = e_value(fc, z, g_far);
        c.require(e_far < res.u - 0.1, "guard: no lower energy beyond g_star (e_far=" +
                                           fmt(e_far) + ", u=" + fmt(res.u) + ")");
    }
    (void)tol;
    return c;
}

double tol_or(const std::map<std::string, double>& overrides, const std::string& key,
              double fallback) {
    const auto it = overrides.find(key);
    return it == overrides.end() ? fallback : it->second;
}

} // namespace

std::vector<CriterionResult> run_all(std::ostream& log,
                                     const std::map<std::string, double>& tol_overrides,
                                     const std::string& profile_dir) {
    struct Spec {
        int id;
        const char* name;
        double tol;
        double time_limit;
        std::function<Check(double)> run;
    };

    const std::vector<Spec> specs = {
        {1, "semicircle self-consistency", 1e-8, 5.0, [](double t) { return criterion1(t); }},
        {2, "semicircle additivity oracle", 1e-8, 5.0, [](double t) { return criterion2(t); }},
        {3, "marchenko-pastur shift identity", 1e-9, 1.0, [](double t) { return criterion3(t); }},
        {4, "fixed-point residual, random pairs", 1e-9, 10.0,
         [](double t) { return criterion4(t); }},
        {5, "critical point trichotomy", 1e-6, 10.0, [](double t) { return criterion5(t); }},
        {6, "derivative identities", 1e-6, 5.0, [](double t) { return criterion6(t); }},
        {7, "random matrix edge and potential", 0.1, 180.0,
         [&](double t) { return criterion7(t, tol_or(tol_overrides, "c7_potential", 0.05)); }},
        {8, "tail normalization", 1e-4, 1.0, [](double t) { return criterion8(t); }},
        {9, "support width sandwich", 0.0, 1.0, [](double t) { return criterion9(t); }},
        {10, "profile shapes", 1e-8, 10.0,
         [&](double t) { return criterion10(t, profile_dir); }},
    };

    std::vector<CriterionResult> results;
    for (const auto& spec : specs) {
        const double tol = tol_or(tol_overrides, "c" + std::to_string(spec.id), spec.tol);
        const auto t0 = Clock::now();
        Check check;
        std::string error;
        try {
            check = spec.run(tol);
        } catch (const std::exception& e) {
            check.pass = false;
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        const bool in_time = secs < spec.time_limit;

        CriterionResult res;
        res.id = spec.id;
        res.name = spec.name;
        res.pass = check.pass && in_time;
        res.seconds = secs;
        std::ostringstream detail;
        if (!error.empty()) detail << "exception: " << error;
        else if (!check.note.empty()) detail << check.note;
        else detail << "max err " << fmt(check.worst) << " (tol " << fmt(tol) << ")";
        if (!in_time) detail << "; over time limit " << fmt(spec.time_limit) << "s";
        res.detail = detail.str();
        results.push_back(res);

        log << "criterion " << res.id << " [" << res.name << "] "
            << (res.pass ? "PASS" : "FAIL") << " -- " << res.detail << " [" << fmt(secs)
            << "s]" << std::endl;
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

} // namespace fpconv::acceptance
