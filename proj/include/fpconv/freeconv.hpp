#ifndef FPCONV_FREECONV_HPP
#define FPCONV_FREECONV_HPP

#include <optional>
#include <vector>

#include "fpconv/measure.hpp"
#include "fpconv/rtransform.hpp"
#include "fpconv/stieltjes.hpp"

namespace fpconv {

enum class HStarKind { CriticalPoint, DomainEndpoint };

// The left support edge of the additive convolution and its companions:
//   F(h) = R_mu(-G_nu(h)) + h on dom(F),
//   h_star = leftmost critical point of F, else sup dom(F),
//   z_star = F(h_star) (limit when h_star is a domain endpoint),
//   g_star = G_nu(h_star), possibly +inf ("hard edge").
struct ConvolutionSummary {
    double h_star = 0.0;
    double g_star = 0.0;
    double z_star = 0.0;
    HStarKind h_star_kind = HStarKind::CriticalPoint;
    double f_domain_upper = 0.0; // sup dom(F)
};

enum class CriticalKind { LocalMin, LocalMax, Inflection };
enum class CriticalSource { FixedPoint, RPrimeZero };

struct CriticalPoint {
    double g = 0.0;
    CriticalKind kind = CriticalKind::LocalMin;
    CriticalSource source = CriticalSource::FixedPoint;
};

struct CriticalPointReport {
    std::vector<CriticalPoint> points;
};

// Solution of F(h) = z left of h_star, mapped back through G_nu.
struct ConvRoot {
    double g = 0.0;      // = G_{mu boxplus nu}(z)
    double h_less = 0.0; // leftmost root of F(h) = z
    double fixed_point_residual = 0.0;
};

// Pipeline for a fixed pair (mu, nu); mu must be non-degenerate. The edge
// summary is computed once in the constructor; all queries afterwards are
// const and thread-safe.
class FreeConvolution {
public:
    FreeConvolution(Measure mu, Measure nu);

    const Measure& mu() const { return rt_mu_.measure(); }
    const Measure& nu() const { return nu_; }
    const RTransformReal& r_mu() const { return rt_mu_; }
    const ConvolutionSummary& summary() const { return summary_; }

    bool f_contains(double h) const;
    double f_value(double h) const;
    double f_deriv(double h) const;

    // Unique root of F(h) = z in (-inf, h_star) for z < z_star, plus the
    // fixed-point residual |G_nu(z - R_mu(-g)) - g| at the returned g.
    ConvRoot stieltjes(double z) const;

    // Second root of F(h) = z from the left, if one exists right of h_star.
    std::optional<double> h_greater(double z) const;

    // Critical points of E_{mu,nu,z} reachable through F(h) = z roots (the
    // built-in families all have strictly increasing R on their domain, so
    // there are no R'-zero critical points to add). 'edge_tol': |z - z_star|
    // below it is treated as z = z_star.
    CriticalPointReport classify(double z, double edge_tol = 1e-6) const;

    // Right boundary of {g > 0 : z - R_mu(-g) < supp_- nu} intersected with
    // the admissible g-range; +inf when nothing binds.
    double e_domain_upper(double z) const;

    // Largest admissible g (from the R-transform domain); +inf when the
    // domain is unbounded on that side.
    double g_domain_upper() const;

private:
    double f_value_at(double h, double* zhint) const;
    double f_deriv_at(double h, double* zhint) const;
    double e_deriv_sign_probe(double z, double g) const;
    void compute_summary();

    RTransformReal rt_mu_;
    Measure nu_;
    StieltjesEdgeData edge_nu_;
    SupportInterval supp_nu_;
    double scale_ = 1.0;
    ConvolutionSummary summary_;
};

// Operation-style veneers.
double f_value(const Measure& mu, const Measure& nu, double h);
double f_deriv(const Measure& mu, const Measure& nu, double h);
ConvolutionSummary endpoint_summary(const Measure& mu, const Measure& nu);
ConvRoot conv_stieltjes(const Measure& mu, const Measure& nu, double z);
std::optional<double> h_greater(const Measure& mu, const Measure& nu, double z);
CriticalPointReport classify_critical_points(const Measure& mu, const Measure& nu, double z);

} // namespace fpconv

#endif
