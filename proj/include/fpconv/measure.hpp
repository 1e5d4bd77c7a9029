#ifndef FPCONV_MEASURE_HPP
#define FPCONV_MEASURE_HPP

#include <functional>
#include <string>
#include <vector>

namespace fpconv {

enum class MeasureKind { Atomic, Semicircle, MarchenkoPastur, JacobiDensity };

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

struct SupportInterval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
};

// Compactly supported probability measure on R. One of:
//   Atomic           -- finitely many atoms, weights summing to 1
//   Semicircle(beta) -- density sqrt(4 beta^2 - x^2) / (2 pi beta^2) on [-2b, 2b]
//   MarchenkoPastur(beta) -- max(1-beta,0) delta_0 plus
//                       sqrt((l+ - x)(x - l-)) / (2 pi x) on [l-, l+],
//                       l+- = (1 +- sqrt(beta))^2
//   JacobiDensity    -- c (x-a)^p (b-x)^q on [a, b], c fixed by total mass 1
// Values are immutable; all operations on them are pure.
class Measure {
public:
    static Measure atomic(std::vector<Atom> atoms);
    static Measure point_mass(double location);
    static Measure two_atoms(double x1, double x2); // weights 1/2, 1/2
    static Measure semicircle(double beta);
    static Measure marchenko_pastur(double beta);
    static Measure jacobi(double a, double b, double p, double q);

    MeasureKind kind() const { return kind_; }
    SupportInterval support() const;
    bool is_degenerate() const; // single atom

    double beta() const;                    // Semicircle / MarchenkoPastur
    const std::vector<Atom>& atoms() const; // Atomic
    double jacobi_a() const { return a_; }
    double jacobi_b() const { return b_; }
    double jacobi_p() const { return p_; }
    double jacobi_q() const { return q_; }
    double jacobi_c() const { return c_; } // normalization constant

    // Mass of the atom at the lower support edge (0 when none). The log
    // potential and the E functional diverge at their domain boundary
    // exactly when this is positive.
    double lower_edge_atom() const;

    std::string describe() const;

private:
    Measure() = default;
    MeasureKind kind_ = MeasureKind::Atomic;
    std::vector<Atom> atoms_;
    double beta_ = 0.0;
    double a_ = 0.0, b_ = 0.0, p_ = 0.0, q_ = 0.0, c_ = 0.0;
};

SupportInterval support(const Measure& m);

// Whether the integrand should be treated as singular (log-type) at a
// support edge. The quadrature then switches to the double-exponential rule,
// whose nodes cluster at the endpoints.
enum class EdgeSingularity { None, LogAtLower, LogAtUpper };

// int f dm with absolute accuracy ~1e-10 for smooth f; edge-adapted rules
// for the power-law densities.
double integrate(const Measure& m, const std::function<double(double)>& f,
                 EdgeSingularity singular = EdgeSingularity::None);

// int x^k dm, k <= 8, by closed form (Atomic, Semicircle, MarchenkoPastur)
// or quadrature (JacobiDensity).
double moment(const Measure& m, int k);

// m((-inf, x]) -- atoms counted fully at their location.
double cdf(const Measure& m, double x);

// The n quantiles at levels (i - 1/2)/n, ascending. Used as deterministic
// diagonal realizations of the measure.
std::vector<double> diagonal_quantiles(const Measure& m, int n);

} // namespace fpconv

#endif
