#ifndef FPCONV_QUADRATURE_HPP
#define FPCONV_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

namespace fpconv::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]. Results are memoized per n; thread-safe.
const Rule& gauss_legendre(int n);

// Gauss-Chebyshev rule of the second kind: sum w_i f(x_i) ~ int_{-1}^{1}
// f(x) sqrt(1-x^2) dx. Nodes and weights are closed-form.
Rule gauss_chebyshev2(int n);

// int_a^b f(x) dx by fixed-order Gauss-Legendre.
double integrate_gauss(const std::function<double(double)>& f,
                       double a, double b, int n = 64);

// Adaptive tanh-sinh (double exponential) quadrature of
//   int_a^b (x-a)^p (b-x)^q g(x) dx,    p, q > -1, g finite on [a, b].
// The power-law weights are evaluated from the exact distance to the
// endpoint (never from the rounded abscissa), so edge exponents keep full
// accuracy down to offsets of ~1e-300. g receives the rounded abscissa
// plus both exact endpoint distances (x - a and b - x); integrands with
// poles just outside the interval should build their denominators from
// the distances to avoid cancellation in the boundary layer.
// Convergence: successive refinements must move by less than
// tol * max(rel_floor, |integral|); rel_floor = 0 requests fully relative
// accuracy (suitable for one-signed integrands of any magnitude). A late
// roundoff plateau (refinement no longer improving) is also accepted.
// Throws NonIntegrable when the sums fail to settle or turn non-finite.
using WeightedIntegrand = std::function<double(double x, double dist_a, double dist_b)>;

double tanh_sinh_weighted(const WeightedIntegrand& g,
                          double a, double b, double p, double q,
                          double tol = 1e-12, double rel_floor = 1.0,
                          int max_level = 12);

double tanh_sinh_weighted(const std::function<double(double)>& g,
                          double a, double b, double p, double q,
                          double tol = 1e-12, double rel_floor = 1.0,
                          int max_level = 12);

// Unweighted variant (p = q = 0); still fine for log-type endpoint
// singularities of the integrand itself.
double tanh_sinh(const std::function<double(double)>& f,
                 double a, double b,
                 double tol = 1e-12, double rel_floor = 1.0, int max_level = 12);

} // namespace fpconv::quad

#endif
