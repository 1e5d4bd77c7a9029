#include "fpconv/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fpconv/errors.hpp"
#include "fpconv/quadrature.hpp"
#include "fpconv/rootfind.hpp"

namespace fpconv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

double u_direct(const Measure& m, double z) {
    const auto sup = m.support();
    if (!(z < sup.lower))
        throw InsideSupport("u_direct requires z strictly left of the support");
    const double dist = sup.lower - z;
    const auto flag = dist < 0.5 * std::max(1.0, sup.width()) ? EdgeSingularity::LogAtLower
                                                              : EdgeSingularity::None;
    return integrate(m, [z](double x) { return std::log(x - z); }, flag);
}

namespace {

// First term of E: int_0^g s R'_mu(-s) ds.
double e_first_term(const FreeConvolution& fc, double g) {
    const Measure& mu = fc.mu();
    switch (mu.kind()) {
        case MeasureKind::Semicircle: {
            const double b = mu.beta();
            return 0.5 * b * b * g * g;
        }
        case MeasureKind::MarchenkoPastur: {
            const double b = mu.beta();
            return b * (std::log1p(g) - g / (1.0 + g));
        }
        default: {
            // The integrand s R'_mu(-s) is analytic on [0, g] inside -dhat.
            const auto& rule = quad::gauss_legendre(64);
            double sum = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double s = 0.5 * g * (1.0 + rule.nodes[i]);
                sum += rule.weights[i] * s * fc.r_mu().deriv(-s);
            }
            return 0.5 * g * sum;
        }
    }
}

void require_in_e_domain(const FreeConvolution& fc, double z, double g, double shift) {
    if (!fc.r_mu().domain().contains(-g))
        throw OutOfDomain("g outside -D_mu");
    if (!(shift < fc.nu().support().lower))
        throw OutOfDomain("z - R_mu(-g) must lie left of supp_- nu");
    (void)z;
}

} // namespace

double e_value(const FreeConvolution& fc, double z, double g) {
    const double shift = z - fc.r_mu().value(-g);
    require_in_e_domain(fc, z, g, shift);
    const auto sup_nu = fc.nu().support();
    const double dist = sup_nu.lower - shift;
    const auto flag = dist < 0.5 * std::max(1.0, sup_nu.width()) ? EdgeSingularity::LogAtLower
                                                                 : EdgeSingularity::None;
    const double log_term =
        integrate(fc.nu(), [shift](double x) { return std::log(x - shift); }, flag);
    return e_first_term(fc, g) + log_term;
}

double e_deriv(const FreeConvolution& fc, double z, double g) {
    const double shift = z - fc.r_mu().value(-g);
    require_in_e_domain(fc, z, g, shift);
    return fc.r_mu().deriv(-g) * (g - g_value(fc.nu(), shift));
}

double e_value(const Measure& mu, const Measure& nu, double z, double g) {
    return e_value(FreeConvolution(mu, nu), z, g);
}

double e_deriv(const Measure& mu, const Measure& nu, double z, double g) {
    return e_deriv(FreeConvolution(mu, nu), z, g);
}

PotentialResult u_variational(const FreeConvolution& fc, double z, bool extended_range) {
    const ConvRoot root = fc.stieltjes(z); // BeyondEdge for z >= z_star
    PotentialResult res;
    res.minimizer_g = root.g;
    res.fixed_point_residual = root.fixed_point_residual;
    res.method = PotentialMethod::VariationalAtRoot;
    res.u = e_value(fc, z, root.g);

    // Verification pass: bounded minimization over (0, g_star), away from
    // the boundary where E can dive to -inf.
    const double g_star = fc.summary().g_star;
    const double e_hi = fc.e_domain_upper(z);
    double hi = std::isfinite(g_star) ? g_star * (1.0 - 1e-9) : kInf;
    if (extended_range) {
        // Widen toward the image of the second root, staying clear of the
        // local maximum there; requires R' > 0 over the whole window.
        const auto h2 = fc.h_greater(z);
        double wide = h2 ? g_value(fc.nu(), *h2) : e_hi;
        if (std::isfinite(wide)) {
            wide *= 1.0 - 1e-6;
            bool increasing = true;
            for (int i = 1; i <= 16 && increasing; ++i)
                increasing = fc.r_mu().d_plus_contains(-wide * i / 16.0);
            if (increasing) hi = wide;
        }
    }
    if (std::isfinite(e_hi)) hi = std::min(hi, e_hi - 1e-9 * std::max(1.0, e_hi));
    if (!std::isfinite(hi)) hi = 4.0 * root.g + 4.0;
    hi = std::min(hi, fc.g_domain_upper() * (1.0 - 1e-12));
    const double lo = 1e-9 * std::max(1.0, std::isfinite(g_star) ? g_star : root.g);

    double g_min = root.g;
    if (lo < hi) {
        g_min = golden_section_min([&](double g) { return e_value(fc, z, g); }, lo, hi,
                                   1e-10 * std::max(1.0, hi));
        // Newton polish on E' with a finite-difference second derivative.
        for (int it = 0; it < 3; ++it) {
            const double d1 = e_deriv(fc, z, g_min);
            const double step = 1e-6 * std::max(1.0, std::fabs(g_min));
            const double glo = std::max(g_min - step, lo);
            const double ghi = std::min(g_min + step, hi);
            const double d2 = (e_deriv(fc, z, ghi) - e_deriv(fc, z, glo)) / (ghi - glo);
            if (!(d2 > 0.0)) break;
            const double next = g_min - d1 / d2;
            if (!(next > lo) || !(next < hi)) break;
            g_min = next;
        }
    }
    res.e_at_min = e_value(fc, z, g_min);

    if (std::fabs(res.u - res.e_at_min) > 1e-9 * std::max(1.0, std::fabs(res.u)))
        throw Error("variational value and bounded minimization disagree: " +
                    std::to_string(res.u) + " vs " + std::to_string(res.e_at_min));
    return res;
}

PotentialResult u_variational(const Measure& mu, const Measure& nu, double z,
                              bool extended_range) {
    return u_variational(FreeConvolution(mu, nu), z, extended_range);
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    if (n == 1) {
        v.push_back(a);
        return v;
    }
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1.0));
    return v;
}

const char* critical_kind_token(CriticalKind k) {
    switch (k) {
        case CriticalKind::LocalMin: return "local_min";
        case CriticalKind::LocalMax: return "local_max";
        case CriticalKind::Inflection: return "inflection";
    }
    return "?";
}

} // namespace

const char* profile_kind_token(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::EProfile: return "e";
        case ProfileKind::FProfile: return "f";
        case ProfileKind::GInvProfile: return "ginv";
        case ProfileKind::JProfile: return "j";
    }
    return "?";
}

ProfileTable emit_profile(const Measure& mu, const Measure& nu,
                          std::optional<double> z, ProfileKind kind,
                          std::optional<GridSpec> grid) {
    FreeConvolution fc(mu, nu);
    const auto& sm = fc.summary();
    ProfileTable table;
    table.kind = kind;

    const double edge_scale = std::max(1.0, std::fabs(sm.f_domain_upper));

    if (kind == ProfileKind::EProfile) {
        if (!z) throw ConfigError("the E profile needs a z value");
        const double e_hi = fc.e_domain_upper(*z);
        double hi_default = std::isfinite(e_hi) ? e_hi : fc.g_domain_upper();
        if (!std::isfinite(hi_default))
            hi_default = std::isfinite(sm.g_star) ? 3.0 * sm.g_star : 10.0;
        GridSpec gs = grid.value_or(GridSpec{1e-6, hi_default * (1.0 - 1e-9), 401});
        for (double g : linspace(gs.start, gs.stop, gs.count)) {
            if (!(g > 0.0) || !fc.r_mu().domain().contains(-g)) continue;
            if (std::isfinite(e_hi) && g >= e_hi) continue;
            table.abscissa.push_back(g);
            table.value.push_back(e_value(fc, *z, g));
        }
        if (table.abscissa.empty()) throw OutOfDomain("E profile grid is empty after clipping");
        for (const auto& cp : fc.classify(*z).points) {
            if (!std::isfinite(cp.g)) continue;
            table.annotations.push_back({cp.g, e_value(fc, *z, cp.g), critical_kind_token(cp.kind)});
        }
        return table;
    }

    if (kind == ProfileKind::FProfile) {
        GridSpec gs = grid.value_or(
            GridSpec{sm.f_domain_upper - 10.0 * edge_scale,
                     sm.f_domain_upper - 1e-6 * edge_scale, 401});
        for (double h : linspace(gs.start, gs.stop, gs.count)) {
            if (!fc.f_contains(h)) continue;
            table.abscissa.push_back(h);
            table.value.push_back(fc.f_value(h));
        }
        if (table.abscissa.empty()) throw OutOfDomain("F profile grid is empty after clipping");
        table.annotations.push_back(
            {sm.h_star, sm.z_star,
             sm.h_star_kind == HStarKind::CriticalPoint ? "h_star_critical_point"
                                                        : "h_star_domain_endpoint"});
        return table;
    }

    // GInvProfile and JProfile both sample R_mu(-g) + R_nu(-g) - 1/g, the
    // analytic extension of the inverse of G_{mu boxplus nu}; they differ
    // only in how downstream plots dash the part beyond g_star.
    RTransformReal rt_nu(nu);
    auto j_eval = [&](double g) {
        return fc.r_mu().value(-g) + rt_nu.value(-g) - 1.0 / g;
    };
    const double dom_hi = std::min(-fc.r_mu().domain().lo, -rt_nu.domain().lo);
    double hi_default = std::isfinite(sm.g_star) ? 3.0 * sm.g_star : 10.0;
    if (std::isfinite(dom_hi)) hi_default = std::min(hi_default, dom_hi * (1.0 - 1e-9));
    GridSpec gs = grid.value_or(GridSpec{1e-6, hi_default, 401});
    for (double g : linspace(gs.start, gs.stop, gs.count)) {
        if (!(g > 0.0) || g >= dom_hi) continue;
        table.abscissa.push_back(g);
        table.value.push_back(j_eval(g));
    }
    if (table.abscissa.empty()) throw OutOfDomain("profile grid is empty after clipping");
    if (std::isfinite(sm.g_star) && sm.g_star < dom_hi)
        table.annotations.push_back({sm.g_star, sm.z_star, "g_star"});
    return table;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt17(double v) {
    char buf[40];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::pair<std::string, std::string> write_profile_csv(const ProfileTable& table,
                                                      const std::string& dir,
                                                      const std::string& config_token) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_token)));
    const std::string stem =
        std::string(profile_kind_token(table.kind)) + "_" + hash;
    std::filesystem::create_directories(dir);
    const std::string main_path = dir + "/" + stem + ".csv";
    const std::string annot_path = dir + "/" + stem + "_annotations.csv";

    std::ofstream main(main_path);
    if (!main) throw ConfigError("cannot write " + main_path);
    main << "abscissa,value\n";
    for (std::size_t i = 0; i < table.abscissa.size(); ++i)
        main << fmt17(table.abscissa[i]) << "," << fmt17(table.value[i]) << "\n";

    std::ofstream annot(annot_path);
    if (!annot) throw ConfigError("cannot write " + annot_path);
    annot << "abscissa,value,kind\n";
    for (const auto& a : table.annotations)
        annot << fmt17(a.abscissa) << "," << fmt17(a.value) << "," << a.kind << "\n";

    return {main_path, annot_path};
}

} // namespace fpconv
