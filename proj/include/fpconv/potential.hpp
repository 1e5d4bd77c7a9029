#ifndef FPCONV_POTENTIAL_HPP
#define FPCONV_POTENTIAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "fpconv/freeconv.hpp"
#include "fpconv/measure.hpp"

namespace fpconv {

enum class PotentialMethod { VariationalAtRoot, BoundedMinimization };

struct PotentialResult {
    double u = 0.0;           // log potential of mu boxplus nu at z
    double minimizer_g = 0.0; // = G_{mu boxplus nu}(z)
    double e_at_min = 0.0;    // E at the independently minimized g
    double fixed_point_residual = 0.0;
    PotentialMethod method = PotentialMethod::VariationalAtRoot;
};

// int log(x - z) dm for real z strictly left of the support.
double u_direct(const Measure& m, double z);

// The energy functional
//   E(g) = int_0^g s R'_mu(-s) ds + int log(x - z + R_mu(-g)) dnu(x)
// on {g in -D_mu : z - R_mu(-g) < supp_- nu}. Closed-form first term for
// the semicircle (b^2 g^2 / 2) and Marchenko-Pastur (b log(1+g) - b g/(1+g))
// laws, Gauss-Legendre otherwise.
double e_value(const FreeConvolution& fc, double z, double g);
double e_deriv(const FreeConvolution& fc, double z, double g);
double e_value(const Measure& mu, const Measure& nu, double z, double g);
double e_deriv(const Measure& mu, const Measure& nu, double z, double g);

// Evaluates E at the root g = G_{mu boxplus nu}(z) (the returned value) and
// independently re-minimizes E over (0, g_star) as a cross-check; the two
// must agree to 1e-9. The default verification window stays strictly
// inside (0, g_star): energies beyond it can undercut the true potential.
// 'extended_range' widens the window toward the second root image
// G_nu(h_greater(z)), which is sound only while R'_mu stays positive
// across it; the widened minimization must land on the same minimizer.
PotentialResult u_variational(const FreeConvolution& fc, double z,
                              bool extended_range = false);
PotentialResult u_variational(const Measure& mu, const Measure& nu, double z,
                              bool extended_range = false);

enum class ProfileKind { EProfile, FProfile, GInvProfile, JProfile };

struct ProfileAnnotation {
    double abscissa = 0.0;
    double value = 0.0;
    std::string kind;
};

struct ProfileTable {
    ProfileKind kind = ProfileKind::EProfile;
    std::vector<double> abscissa;
    std::vector<double> value;
    std::vector<ProfileAnnotation> annotations;
};

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

// Sampled curve for one of the four panel kinds, with critical points /
// edge quantities annotated. The grid is clipped to the curve's domain;
// an empty clipped grid raises OutOfDomain. EProfile requires z.
ProfileTable emit_profile(const Measure& mu, const Measure& nu,
                          std::optional<double> z, ProfileKind kind,
                          std::optional<GridSpec> grid = std::nullopt);

const char* profile_kind_token(ProfileKind kind);

// CSV emission: "<token>_<hash>.csv" with header abscissa,value and a
// sibling "<token>_<hash>_annotations.csv" with header abscissa,value,kind.
// Doubles are printed with 17 significant digits. Returns the two paths.
std::pair<std::string, std::string> write_profile_csv(const ProfileTable& table,
                                                      const std::string& dir,
                                                      const std::string& config_token);

} // namespace fpconv

#endif
