#include "fpconv/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "fpconv/eigen_sym.hpp"
#include "fpconv/errors.hpp"
#include "fpconv/rng.hpp"

namespace fpconv {

int max_matrix_dim() {
    if (const char* env = std::getenv("FPCONV_MAX_N")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(v);
    }
    return 4096;
}

namespace {

void validate(const EnsembleSpec& spec) {
    if (spec.n < 16) throw ResourceLimit("matrix dimension must be at least 16");
    if (spec.n > max_matrix_dim())
        throw ResourceLimit("matrix dimension exceeds the configured cap (FPCONV_MAX_N)");
    if (spec.trials < 1) throw ConfigError("need at least one trial");
    if (!(spec.beta > 0.0)) throw ConfigError("ensemble beta must be > 0");
}

// Filling order is fixed (upper triangle row by row, then X row-major), so
// a (seed, trial) pair pins the spectrum bit for bit.
std::vector<double> sample_matrix(const EnsembleSpec& spec, int trial,
                                  const std::vector<double>& diag_quantiles) {
    const int n = spec.n;
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(trial));
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    if (spec.kind == EnsembleKind::Goe) {
        const double off_sd = spec.beta / std::sqrt(static_cast<double>(n));
        const double diag_sd = off_sd * std::sqrt(2.0);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double v = rng.next_gaussian() * (i == j ? diag_sd : off_sd);
                a[static_cast<std::size_t>(i) * n + j] = v;
                a[static_cast<std::size_t>(j) * n + i] = v;
            }
        }
    } else {
        const int m = std::max(1, static_cast<int>(std::lround(spec.beta * n)));
        std::vector<double> x(static_cast<std::size_t>(n) * m);
        for (auto& v : x) v = rng.next_gaussian();
        // A = X X^T / n realizes the Marchenko-Pastur law with ratio m/n.
        for (int i = 0; i < n; ++i) {
            const double* xi = &x[static_cast<std::size_t>(i) * m];
            for (int j = i; j < n; ++j) {
                const double* xj = &x[static_cast<std::size_t>(j) * m];
                double s = 0.0;
                for (int k = 0; k < m; ++k) s += xi[k] * xj[k];
                s /= n;
                a[static_cast<std::size_t>(i) * n + j] = s;
                a[static_cast<std::size_t>(j) * n + i] = s;
            }
        }
    }
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] += diag_quantiles[i];
    return a;
}

} // namespace

SpectrumSample sample_spectrum(const EnsembleSpec& spec, int trial) {
    validate(spec);
    if (trial < 0 || trial >= spec.trials) throw ConfigError("trial index out of range");
    const auto diag = diagonal_quantiles(spec.nu, spec.n);
    SpectrumSample out;
    out.trial_index = trial;
    out.seed_used = spec.seed;
    out.eigenvalues = symmetric_eigenvalues(sample_matrix(spec, trial, diag), spec.n);
    return out;
}

double empirical_potential(const SpectrumSample& s, double z) {
    if (s.eigenvalues.empty()) throw ConfigError("empty spectrum");
    if (!(z < s.eigenvalues.front()))
        throw ZInsideSpectrum("z must lie below the smallest eigenvalue");
    double sum = 0.0;
    for (double lam : s.eigenvalues) sum += std::log(lam - z);
    return sum / static_cast<double>(s.eigenvalues.size());
}

McRun run_ensemble(const EnsembleSpec& spec, double z) {
    validate(spec);
    const auto diag = diagonal_quantiles(spec.nu, spec.n);

    McRun run;
    run.n = spec.n;
    run.trials = spec.trials;
    run.z = z;
    run.achieved_beta = spec.kind == EnsembleKind::Goe
                            ? spec.beta
                            : std::max(1, static_cast<int>(std::lround(spec.beta * spec.n))) /
                                  static_cast<double>(spec.n);
    run.rows.resize(spec.trials);

    std::atomic<int> next{0};
    std::atomic<bool> z_inside{false};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(spec.trials));
    auto work = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= spec.trials) return;
            const auto eigs = symmetric_eigenvalues(sample_matrix(spec, t, diag), spec.n);
            TrialRow row;
            row.trial = t;
            row.min_eig = eigs.front();
            if (std::isfinite(z)) {
                if (z < eigs.front()) {
                    double sum = 0.0;
                    for (double lam : eigs) sum += std::log(lam - z);
                    row.potential_at_z = sum / spec.n;
                } else {
                    z_inside.store(true);
                }
            } else {
                row.potential_at_z = std::numeric_limits<double>::quiet_NaN();
            }
            run.rows[t] = row;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (z_inside.load())
        throw ZInsideSpectrum("z is not below the smallest sampled eigenvalue in every trial");

    double edge_sum = 0.0, pot_sum = 0.0;
    for (const auto& row : run.rows) {
        edge_sum += row.min_eig;
        pot_sum += row.potential_at_z;
    }
    run.edge_mean = edge_sum / spec.trials;
    run.potential_mean = std::isfinite(z) ? pot_sum / spec.trials
                                          : std::numeric_limits<double>::quiet_NaN();
    return run;
}

double empirical_edge(const EnsembleSpec& spec) {
    return run_ensemble(spec, std::numeric_limits<double>::quiet_NaN()).edge_mean;
}

} // namespace fpconv
