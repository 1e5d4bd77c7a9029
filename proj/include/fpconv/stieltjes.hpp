#ifndef FPCONV_STIELTJES_HPP
#define FPCONV_STIELTJES_HPP

#include <limits>

#include "fpconv/measure.hpp"

namespace fpconv {

// Boundary values of G and G' at the support edges. Divergent limits are
// IEEE infinities, never large finite stand-ins: downstream case analysis
// branches on finiteness.
struct StieltjesEdgeData {
    double g_star = 0.0;       // lim of G at the lower edge, in (0, +inf]
    double g_star_prime = 0.0; // lim of G' at the lower edge, in (0, +inf]
    double g_plus = 0.0;       // lim of G at the upper edge, in [-inf, 0)
};

// G(z) = int dm(x) / (x - z) for real z outside the closed support.
// Positive left of the support, negative right of it. Closed forms for the
// semicircle and Marchenko-Pastur laws, exact sums for atoms, quadrature
// otherwise. Throws InsideSupport.
double g_value(const Measure& m, double z);

// k-th derivative, k in [1, 4]: k! int (x - z)^-(k+1) dm. Strictly positive
// left of the support.
double g_deriv(const Measure& m, double z, int k = 1);

StieltjesEdgeData edge_data(const Measure& m);

// Inverse of G restricted to (-inf, lower support edge): the unique z with
// G(z) = g, for g in (0, g_star). Residual |G(z) - g| <= 1e-12 max(1, g)
// away from the edge, 1e-9 near it. Throws OutOfRange.
// 'hint' optionally warm-starts the numeric search.
double g_inverse(const Measure& m, double g,
                 double hint = std::numeric_limits<double>::quiet_NaN());

// Same for the branch right of the support: g in (g_plus, 0).
double g_inverse_right(const Measure& m, double g,
                       double hint = std::numeric_limits<double>::quiet_NaN());

// The analytic extension of the inverse, R(-g) - 1/g. Agrees with g_inverse
// on (0, g_star) and extends beyond it when the R-transform has a wider
// closed-form domain (semicircle: all of R, Marchenko-Pastur: g > -1).
double g_inverse_extended(const Measure& m, double g);

namespace detail {
// Mirror image m(-dx); Marchenko-Pastur has no reflected family member and
// is handled by closed forms before this is ever reached.
Measure reflected(const Measure& m);
} // namespace detail

} // namespace fpconv

#endif
