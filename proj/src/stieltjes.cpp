#include "fpconv/stieltjes.hpp"

#include <algorithm>
#include <cmath>

#include "fpconv/errors.hpp"
#include "fpconv/quadrature.hpp"
#include "fpconv/rootfind.hpp"

namespace fpconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_beta_fn(double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

void require_outside(const Measure& m, double z) {
    const auto sup = m.support();
    if (z >= sup.lower && z <= sup.upper)
        throw InsideSupport("z = " + std::to_string(z) + " lies in the closed support of " +
                            m.describe());
}

// Semicircle: G(z) = (-z - sqrt(z^2 - 4 b^2)) / (2 b^2) left of the support,
// written in cancellation-free form on both branches.
double g_semicircle(double beta, double z) {
    const double s = std::sqrt(z * z - 4.0 * beta * beta);
    if (z < 0.0) return (-z - s) / (2.0 * beta * beta);
    return -2.0 / (z + s);
}

double g_deriv_semicircle(double beta, double z, int k) {
    const double s = std::sqrt(z * z - 4.0 * beta * beta);
    if (z > 0.0) {
        // G is odd under reflection, so G^(k)(z) = (-1)^(k+1) G^(k)(-z).
        const double left = g_deriv_semicircle(beta, -z, k);
        return (k % 2 == 1) ? left : -left;
    }
    switch (k) {
        case 1: return 2.0 / (s * (s - z));
        case 2: return 2.0 / (s * s * s);
        case 3: return -6.0 * z / std::pow(s, 5);
        case 4: return (24.0 * z * z + 24.0 * beta * beta) / std::pow(s, 7);
    }
    throw ConfigError("g_deriv supports orders 1..4");
}

// Marchenko-Pastur: roots of z G^2 + (z + 1 - beta) G + 1 = 0, stable forms.
double g_mp(double beta, double z, bool left_of_support) {
    const double w = beta - 1.0 - z;
    const double s = std::sqrt(w * w - 4.0 * z);
    return left_of_support ? 2.0 / (w + s) : 2.0 / (w - s);
}

double g_deriv1_mp(double beta, double z, bool left_of_support) {
    const double w = beta - 1.0 - z;
    const double s = std::sqrt(w * w - 4.0 * z);
    if (left_of_support) {
        const double d = w + s;
        return 2.0 * (s + w + 2.0) / (s * d * d);
    }
    const double d = w - s;
    return 2.0 * (s - w - 2.0) / (s * d * d);
}

// Density-weighted quadrature of k! (x - z)^-(k+1); the double-exponential
// rule resolves both the edge exponent and a pole just outside the support.
// The integrand is one-signed, so convergence is fully relative and the
// result stays accurate for very distant z where G ~ 1/|z|.
double g_deriv_quadrature(const Measure& m, double z, int k) {
    const double fact = (k == 0) ? 1.0 : (k == 1) ? 1.0 : (k == 2) ? 2.0 : (k == 3) ? 6.0 : 24.0;
    // Derivative orders feed root-finding slopes and sign scans; a notch
    // less accuracy there buys a quadrature level.
    const double tol = k == 0 ? 1e-12 : 1e-11;
    const auto sup = m.support();
    // Build |x - z| from the exact endpoint distance: for z in the boundary
    // layer the naive x - z loses every significant digit.
    const bool pole_left = z < sup.lower;
    const double gap = pole_left ? sup.lower - z : z - sup.upper;
    const double sign = (pole_left || (k + 1) % 2 == 0) ? 1.0 : -1.0;
    auto pole = [&](double da, double db) {
        const double dist = pole_left ? da + gap : db + gap;
        return sign * std::pow(dist, -(k + 1));
    };
    double integral = 0.0;
    switch (m.kind()) {
        case MeasureKind::Semicircle: {
            const double b = m.beta();
            quad::WeightedIntegrand g = [&](double, double da, double db) {
                return pole(da, db) / (2.0 * std::numbers::pi * b * b);
            };
            integral = quad::tanh_sinh_weighted(g, sup.lower, sup.upper, 0.5, 0.5, tol, 0.0);
            break;
        }
        case MeasureKind::MarchenkoPastur: {
            const double beta = m.beta();
            const double sq = std::sqrt(beta);
            const double lm = (1.0 - sq) * (1.0 - sq);
            const double lp = (1.0 + sq) * (1.0 + sq);
            // The continuous part starts at lm, not at the support lower
            // edge (which is the atom position when beta < 1), so the pole
            // gap is measured against [lm, lp].
            const double gap_mp = pole_left ? lm - z : z - lp;
            quad::WeightedIntegrand g = [&](double, double da, double db) {
                const double dist = pole_left ? da + gap_mp : db + gap_mp;
                return sign * std::pow(dist, -(k + 1)) /
                       (2.0 * std::numbers::pi * (lm + da));
            };
            integral = quad::tanh_sinh_weighted(g, lm, lp, 0.5, 0.5, tol, 0.0);
            if (beta < 1.0) integral += (1.0 - beta) * std::pow(0.0 - z, -(k + 1));
            break;
        }
        case MeasureKind::JacobiDensity: {
            const double c = m.jacobi_c();
            quad::WeightedIntegrand g = [&](double, double da, double db) {
                return c * pole(da, db);
            };
            integral = quad::tanh_sinh_weighted(g, m.jacobi_a(), m.jacobi_b(), m.jacobi_p(),
                                                m.jacobi_q(), tol, 0.0);
            break;
        }
        default:
            throw Error("unreachable");
    }
    return fact * integral;
}

} // namespace

double g_value(const Measure& m, double z) {
    require_outside(m, z);
    const auto sup = m.support();
    const bool left = z < sup.lower;
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            double sum = 0.0;
            for (const auto& a : m.atoms()) sum += a.weight / (a.location - z);
            return sum;
        }
        case MeasureKind::Semicircle:
            return g_semicircle(m.beta(), z);
        case MeasureKind::MarchenkoPastur:
            return g_mp(m.beta(), z, left);
        case MeasureKind::JacobiDensity:
            return g_deriv_quadrature(m, z, 0);
    }
    throw Error("unreachable");
}

double g_deriv(const Measure& m, double z, int k) {
    if (k < 1 || k > 4) throw ConfigError("g_deriv supports orders 1..4");
    require_outside(m, z);
    const auto sup = m.support();
    const bool left = z < sup.lower;
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            const double fact = (k == 1) ? 1.0 : (k == 2) ? 2.0 : (k == 3) ? 6.0 : 24.0;
            double sum = 0.0;
            for (const auto& a : m.atoms())
                sum += a.weight * std::pow(a.location - z, -(k + 1));
            return fact * sum;
        }
        case MeasureKind::Semicircle:
            return g_deriv_semicircle(m.beta(), z, k);
        case MeasureKind::MarchenkoPastur:
            if (k == 1) return g_deriv1_mp(m.beta(), z, left);
            return g_deriv_quadrature(m, z, k);
        case MeasureKind::JacobiDensity:
            return g_deriv_quadrature(m, z, k);
    }
    throw Error("unreachable");
}

StieltjesEdgeData edge_data(const Measure& m) {
    StieltjesEdgeData e;
    switch (m.kind()) {
        case MeasureKind::Atomic:
            e.g_star = kInf;
            e.g_star_prime = kInf;
            e.g_plus = -kInf;
            return e;
        case MeasureKind::Semicircle:
            e.g_star = 1.0 / m.beta();
            e.g_star_prime = kInf;
            e.g_plus = -1.0 / m.beta();
            return e;
        case MeasureKind::MarchenkoPastur: {
            const double sq = std::sqrt(m.beta());
            e.g_star = m.beta() > 1.0 ? 1.0 / (sq - 1.0) : kInf;
            e.g_star_prime = kInf;
            e.g_plus = -1.0 / (1.0 + sq);
            return e;
        }
        case MeasureKind::JacobiDensity: {
            const double a = m.jacobi_a(), b = m.jacobi_b();
            const double p = m.jacobi_p(), q = m.jacobi_q(), c = m.jacobi_c();
            const double w = b - a;
            e.g_star = p > 0.0 ? c * std::pow(w, p + q) * std::exp(log_beta_fn(p, q + 1.0)) : kInf;
            e.g_star_prime =
                p > 1.0 ? c * std::pow(w, p + q - 1.0) * std::exp(log_beta_fn(p - 1.0, q + 1.0))
                        : kInf;
            e.g_plus =
                q > 0.0 ? -c * std::pow(w, p + q) * std::exp(log_beta_fn(p + 1.0, q)) : -kInf;
            return e;
        }
    }
    throw Error("unreachable");
}

namespace detail {

Measure reflected(const Measure& m) {
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            std::vector<Atom> rev(m.atoms().rbegin(), m.atoms().rend());
            for (auto& a : rev) a.location = -a.location;
            return Measure::atomic(std::move(rev));
        }
        case MeasureKind::Semicircle:
            return m;
        case MeasureKind::JacobiDensity:
            return Measure::jacobi(-m.jacobi_b(), -m.jacobi_a(), m.jacobi_q(), m.jacobi_p());
        case MeasureKind::MarchenkoPastur:
            throw Error("reflected Marchenko-Pastur is not representable");
    }
    throw Error("unreachable");
}

} // namespace detail

namespace {

// Numeric inversion on the left branch: bracket the root by doubling away
// from the edge (G decreases to 0 at -inf) or halving the edge distance
// (G increases to g_star), then safeguarded Newton.
double g_inverse_numeric(const Measure& m, double g, double g_star, double hint) {
    const auto sup = m.support();
    const double scale = std::max(1.0, sup.width());
    const bool near_edge = std::isfinite(g_star) && g > 0.9 * g_star;
    const double ftol = (near_edge ? 1e-9 : 1e-12) * g;

    auto G = [&](double z) { return g_value(m, z); };

    double lo, hi;
    double probe = std::isfinite(hint) && hint < sup.lower ? hint : sup.lower - scale;
    const double gp = G(probe);
    if (gp > g) {
        // Root lies further left; double the distance until G drops below g.
        double dist = sup.lower - probe;
        hi = probe;
        for (int k = 0;; ++k) {
            if (k > 80) throw OutOfRange("g_inverse: failed to bracket (g too small?)");
            dist *= 2.0;
            lo = sup.lower - dist;
            if (G(lo) <= g) break;
            hi = lo;
        }
    } else {
        // Root lies between the probe and the edge; halve the edge distance.
        // Steep edges (weak density exponents) put the true root closer to
        // the edge than doubles can express; saturate at a floor of a few
        // ulps so the result never rounds onto the edge itself.
        const double d_floor =
            std::max(32.0 * std::numeric_limits<double>::epsilon() * std::fabs(sup.lower), 1e-30);
        double dist = sup.lower - probe;
        lo = probe;
        if (dist <= d_floor) return sup.lower - d_floor;
        for (int k = 0;; ++k) {
            if (k > 600) throw OutOfRange("g_inverse: g appears to exceed the edge limit of G");
            dist *= 0.5;
            if (dist <= d_floor) return sup.lower - d_floor;
            hi = sup.lower - dist;
            if (G(hi) >= g) break;
            lo = hi;
        }
    }
    return find_root([&](double z) { return G(z) - g; },
                     [&](double z) { return g_deriv(m, z, 1); }, lo, hi,
                     1e-15 * std::max(1.0, std::fabs(lo)), ftol);
}

} // namespace

double g_inverse(const Measure& m, double g, double hint) {
    const auto e = edge_data(m);
    if (!(g > 0.0) || !(g < e.g_star))
        throw OutOfRange("g_inverse: g must lie in (0, g_star)");
    if (m.is_degenerate()) return m.atoms().front().location - 1.0 / g;
    switch (m.kind()) {
        case MeasureKind::Semicircle: {
            const double b = m.beta();
            return -b * b * g - 1.0 / g;
        }
        case MeasureKind::MarchenkoPastur:
            return m.beta() / (1.0 + g) - 1.0 / g;
        default:
            return g_inverse_numeric(m, g, e.g_star, hint);
    }
}

double g_inverse_right(const Measure& m, double g, double hint) {
    const auto e = edge_data(m);
    if (!(g < 0.0) || !(g > e.g_plus))
        throw OutOfRange("g_inverse_right: g must lie in (g_plus, 0)");
    if (m.is_degenerate()) return m.atoms().front().location - 1.0 / g;
    switch (m.kind()) {
        case MeasureKind::Semicircle: {
            const double b = m.beta();
            return -b * b * g - 1.0 / g;
        }
        case MeasureKind::MarchenkoPastur:
            return m.beta() / (1.0 + g) - 1.0 / g;
        default: {
            const Measure r = detail::reflected(m);
            const double h = std::isfinite(hint) ? -hint : hint;
            return -g_inverse(r, -g, h);
        }
    }
}

} // namespace fpconv
