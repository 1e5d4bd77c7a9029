#ifndef FPCONV_MONTECARLO_HPP
#define FPCONV_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "fpconv/measure.hpp"

namespace fpconv {

// GOE realizes the semicircle law on [-2 beta, 2 beta]; Wishart realizes
// the Marchenko-Pastur law with ratio beta (X X^T / n with X of shape
// n x round(beta n)).
enum class EnsembleKind { Goe, Wishart };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Goe;
    double beta = 1.0;
    Measure nu = Measure::point_mass(0.0); // added as a deterministic diagonal of nu-quantiles
    int n = 256;
    int trials = 10;
    std::uint64_t seed = 12345;
};

struct SpectrumSample {
    std::vector<double> eigenvalues; // ascending, length n
    int trial_index = 0;
    std::uint64_t seed_used = 0;
};

// Dimension cap; FPCONV_MAX_N overrides the default of 4096.
int max_matrix_dim();

// Eigenvalues of A + diag(nu-quantiles), A GOE or Wishart, deterministic
// given (seed, trial) through a counter-based generator.
SpectrumSample sample_spectrum(const EnsembleSpec& spec, int trial);

// (1/n) sum log(lambda_i - z); requires z below the smallest eigenvalue.
double empirical_potential(const SpectrumSample& s, double z);

// Mean over trials of the smallest eigenvalue.
double empirical_edge(const EnsembleSpec& spec);

struct TrialRow {
    int trial = 0;
    double min_eig = 0.0;
    double potential_at_z = 0.0;
};

struct McRun {
    int n = 0;
    int trials = 0;
    double z = 0.0;
    double achieved_beta = 0.0; // m/n actually used for Wishart, beta for GOE
    double edge_mean = 0.0;
    double potential_mean = 0.0;
    std::vector<TrialRow> rows; // ordered by trial index
};

// All trials (fanned out across threads; results merged by trial index,
// so the output is independent of the thread count).
McRun run_ensemble(const EnsembleSpec& spec, double z);

} // namespace fpconv

#endif
