#include "fpconv/freeconv.hpp"

#include <algorithm>
#include <cmath>

#include "fpconv/errors.hpp"
#include "fpconv/rootfind.hpp"

namespace fpconv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

FreeConvolution::FreeConvolution(Measure mu, Measure nu)
    : rt_mu_(std::move(mu)), nu_(std::move(nu)) {
    if (rt_mu_.measure().is_degenerate())
        throw DegenerateMeasure("the mu slot requires a non-degenerate measure");
    edge_nu_ = edge_data(nu_);
    supp_nu_ = nu_.support();
    const auto supp_mu = rt_mu_.measure().support();
    scale_ = std::max({1.0, std::fabs(supp_nu_.lower), supp_nu_.width(), supp_mu.width()});

    // dom(F) = { h < supp_- nu : G_nu(h) in -D }. Since G_nu is a positive
    // increasing bijection onto (0, g_star_nu), the only way -D can bind is
    // through its supremum.
    const double g_cap = -rt_mu_.domain().lo; // sup of -D on the positive side
    double upper = supp_nu_.lower;
    if (g_cap < edge_nu_.g_star) upper = g_inverse(nu_, g_cap);
    summary_.f_domain_upper = upper;

    compute_summary();
}

bool FreeConvolution::f_contains(double h) const {
    if (!(h < supp_nu_.lower)) return false;
    const double g = g_value(nu_, h);
    return rt_mu_.domain().contains(-g);
}

double FreeConvolution::f_value_at(double h, double* zhint) const {
    const double g = g_value(nu_, h);
    const Measure& mu = rt_mu_.measure();
    const bool numeric = mu.kind() == MeasureKind::Atomic || mu.kind() == MeasureKind::JacobiDensity;
    if (numeric && g > 2e-3) {
        // R_mu(-g) + h = Ginv_mu(g) + 1/g + h; feed the previous inversion
        // result as a warm start during monotone scans.
        const double z = g_inverse(mu, g, zhint ? *zhint : kNaN);
        if (zhint) *zhint = z;
        return z + 1.0 / g + h;
    }
    return rt_mu_.value(-g) + h;
}

double FreeConvolution::f_deriv_at(double h, double* zhint) const {
    const double g = g_value(nu_, h);
    const double gp = g_deriv(nu_, h, 1);
    const Measure& mu = rt_mu_.measure();
    const bool numeric = mu.kind() == MeasureKind::Atomic || mu.kind() == MeasureKind::JacobiDensity;
    double rp;
    if (numeric && g > 2e-3) {
        const double z = g_inverse(mu, g, zhint ? *zhint : kNaN);
        if (zhint) *zhint = z;
        rp = -1.0 / g_deriv(mu, z, 1) + 1.0 / (g * g);
    } else {
        rp = rt_mu_.deriv(-g);
    }
    return 1.0 - rp * gp;
}

double FreeConvolution::f_value(double h) const {
    if (!f_contains(h)) throw OutOfDomain("h outside dom(F)");
    return f_value_at(h, nullptr);
}

double FreeConvolution::f_deriv(double h) const {
    if (!f_contains(h)) throw OutOfDomain("h outside dom(F)");
    return f_deriv_at(h, nullptr);
}

void FreeConvolution::compute_summary() {
    const double upper = summary_.f_domain_upper;
    const double edge_scale = std::max(1.0, std::fabs(upper));

    // Scan F' on h = upper - exp(s): resolves both the far tail, where
    // F' -> 1, and the boundary layer at the domain end.
    double reach = 100.0 * scale_;
    const double s_lo = std::log(1e-13 * edge_scale);
    std::vector<double> sgrid, fp;

    auto build = [&](int n) {
        sgrid.clear();
        fp.clear();
        const double s_hi = std::log(reach);
        double zhint = kNaN;
        for (int i = 0; i < n; ++i) {
            const double s = s_hi + (s_lo - s_hi) * i / (n - 1.0);
            sgrid.push_back(s);
            fp.push_back(f_deriv_at(upper - std::exp(s), &zhint));
        }
    };

    build(256);
    if (fp.front() <= 0.0) {
        reach *= 100.0;
        build(256);
        if (fp.front() <= 0.0)
            throw Error("F' not positive at the far left; unexpected for compact supports");
    }

    std::size_t cross = 0;
    auto find_cross = [&]() {
        for (cross = 0; cross + 1 < fp.size(); ++cross)
            if (fp[cross] > 0.0 && fp[cross + 1] <= 0.0) return true;
        return false;
    };

    bool found = find_cross();
    if (!found) {
        build(1024); // one adaptive refinement against narrow dips
        found = find_cross();
    }

    if (found) {
        double zhint = kNaN;
        auto fps = [&](double s) { return f_deriv_at(upper - std::exp(s), &zhint); };
        const double s_root = bisect(fps, sgrid[cross], sgrid[cross + 1], 80);
        const double h_star = upper - std::exp(s_root);
        summary_.h_star = h_star;
        summary_.h_star_kind = HStarKind::CriticalPoint;
        summary_.g_star = g_value(nu_, h_star);
        summary_.z_star = f_value_at(h_star, nullptr);
        return;
    }

    // Grazing contact: F' dips to ~0 at an interior point without crossing.
    // A decay of F' toward the domain end is not a graze; that is the
    // endpoint case below.
    const auto min_it = std::min_element(fp.begin(), fp.end());
    const std::size_t i = static_cast<std::size_t>(min_it - fp.begin());
    if (*min_it < 1e-8 && i > 0 && i + 1 < fp.size() && fp[i - 1] > fp[i] && fp[i + 1] > fp[i]) {
        double zhint = kNaN;
        const double s_touch = golden_section_min(
            [&](double s) { return f_deriv_at(upper - std::exp(s), &zhint); },
            std::min(sgrid[i + 1], sgrid[i - 1]), std::max(sgrid[i + 1], sgrid[i - 1]), 1e-13);
        const double h_touch = upper - std::exp(s_touch);
        if (f_deriv_at(h_touch, nullptr) <= 1e-10) {
            summary_.h_star = h_touch;
            summary_.h_star_kind = HStarKind::CriticalPoint;
            summary_.g_star = g_value(nu_, h_touch);
            summary_.z_star = f_value_at(h_touch, nullptr);
            return;
        }
    }

    // No critical point: h_star is the right end of dom(F). z_star is the
    // limit of F there, accelerated from a geometric refinement sequence;
    // g_star is the corresponding limit of G_nu.
    summary_.h_star = upper;
    summary_.h_star_kind = HStarKind::DomainEndpoint;
    summary_.g_star =
        (upper == supp_nu_.lower) ? edge_nu_.g_star : -rt_mu_.domain().lo;

    std::vector<double> seq;
    double zhint = kNaN;
    double delta = 1e-3 * edge_scale;
    for (int k = 0; k < 8; ++k, delta *= 0.25)
        seq.push_back(f_value_at(upper - delta, &zhint));
    summary_.z_star = aitken_limit(seq);
}

ConvRoot FreeConvolution::stieltjes(double z) const {
    if (!(z < summary_.z_star))
        throw BeyondEdge("z must lie strictly left of the support edge z_star");

    const double edge_scale = std::max(1.0, std::fabs(summary_.h_star));
    // Right end of the bracket: back off from h_star until F >= z.
    double inset = (summary_.h_star_kind == HStarKind::DomainEndpoint) ? 1e-9 * edge_scale : 0.0;
    double zhint = kNaN;
    double hi = summary_.h_star - inset;
    double f_hi = f_value_at(hi, &zhint);
    for (int k = 0; f_hi < z && k < 200; ++k) {
        inset = (inset == 0.0) ? 1e-15 * edge_scale : inset * 0.25;
        hi = summary_.h_star - inset;
        f_hi = f_value_at(hi, &zhint);
    }
    if (f_hi < z) throw BeyondEdge("z is numerically indistinguishable from z_star");

    double step = std::max(1.0, 0.01 * scale_);
    double lo = hi - step;
    double f_lo = f_value_at(lo, &zhint);
    for (int k = 0; f_lo > z; ++k) {
        if (k > 100) throw Error("failed to bracket F(h) = z on the left");
        step *= 2.0;
        lo = hi - step;
        f_lo = f_value_at(lo, &zhint);
    }

    const double h_root =
        find_root([&](double h) { return f_value_at(h, &zhint) - z; },
                  [&](double h) { return f_deriv_at(h, &zhint); }, lo, hi,
                  1e-15 * std::max(1.0, std::fabs(lo)), 1e-12 * std::max(1.0, std::fabs(z)));

    ConvRoot out;
    out.h_less = h_root;
    out.g = g_value(nu_, h_root);
    const double shift = z - rt_mu_.value(-out.g);
    out.fixed_point_residual =
        (shift < supp_nu_.lower) ? std::fabs(g_value(nu_, shift) - out.g) : kInf;
    return out;
}

std::optional<double> FreeConvolution::h_greater(double z) const {
    if (!(z < summary_.z_star))
        throw BeyondEdge("z must lie strictly left of the support edge z_star");
    if (summary_.h_star_kind == HStarKind::DomainEndpoint)
        return std::nullopt; // F is increasing on all of dom(F)

    const double upper = summary_.f_domain_upper;
    const double width = upper - summary_.h_star;
    if (!(width > 0.0)) return std::nullopt;

    // Log grid in the distance to the domain end, from h_star to the end.
    const int n = 256;
    const double d_hi = width;
    const double d_lo = 1e-13 * std::max(1.0, std::fabs(upper));
    double zhint = kNaN;
    double prev_h = summary_.h_star;
    double prev_f = summary_.z_star - z; // >= 0
    for (int i = 1; i <= n; ++i) {
        const double d = d_hi * std::pow(d_lo / d_hi, i / static_cast<double>(n));
        const double h = upper - d;
        if (h <= prev_h) continue;
        const double fv = f_value_at(h, &zhint) - z;
        if (prev_f > 0.0 && fv <= 0.0) {
            const double root = bisect(
                [&](double x) { return f_value_at(x, &zhint) - z; }, prev_h, h, 80);
            return root;
        }
        prev_h = h;
        prev_f = fv;
    }
    return std::nullopt;
}

double FreeConvolution::g_domain_upper() const { return -rt_mu_.domain().lo; }

double FreeConvolution::e_domain_upper(double z) const {
    const double cap = g_domain_upper();
    auto violation = [&](double g) { return z - rt_mu_.value(-g) - supp_nu_.lower; };
    // The violation is increasing in g; find where it crosses 0.
    double lo = 1e-12;
    if (violation(lo) >= 0.0) return lo; // E-domain empty on (0, inf)
    double hi = std::min(1.0, std::isfinite(cap) ? 0.5 * cap : 1.0);
    for (int k = 0; violation(hi) < 0.0; ++k) {
        if (k > 60 || hi >= 1e12) return cap; // never binds below the domain cap
        hi = std::isfinite(cap) ? 0.5 * (hi + cap) : hi * 2.0;
        if (std::isfinite(cap) && cap - hi < 1e-14 * cap) return cap;
    }
    return bisect(violation, lo, hi, 100);
}

double FreeConvolution::e_deriv_sign_probe(double z, double g) const {
    // sign(E'(g)) = sign(R'_mu(-g)) * sign(g - G_nu(z - R_mu(-g))).
    const double shift = z - rt_mu_.value(-g);
    if (!(shift < supp_nu_.lower)) return kNaN;
    const double fp = g - g_value(nu_, shift);
    const double rp = rt_mu_.deriv(-g);
    return (rp > 0.0 ? 1.0 : rp < 0.0 ? -1.0 : 0.0) * fp;
}

CriticalPointReport FreeConvolution::classify(double z, double edge_tol) const {
    CriticalPointReport report;
    const double zs = summary_.z_star;

    if (std::fabs(z - zs) <= edge_tol * std::max(1.0, std::fabs(zs))) {
        // At the edge the critical point sits exactly at g_star and is an
        // inflection; with a hard edge (g_star infinite) there is none.
        if (std::isfinite(summary_.g_star))
            report.points.push_back({summary_.g_star, CriticalKind::Inflection,
                                     CriticalSource::FixedPoint});
        return report;
    }

    // Collect all roots of F(h) = z in dom(F); each maps to a critical
    // point g = G_nu(h) of E, automatically inside the E-domain.
    std::vector<double> roots;
    if (z < zs) {
        roots.push_back(stieltjes(z).h_less);
        // Enumerate sign changes right of h_star.
        const double upper = summary_.f_domain_upper;
        const double width = upper - summary_.h_star;
        if (summary_.h_star_kind == HStarKind::CriticalPoint && width > 0.0) {
            const int n = 384;
            const double d_lo = 1e-13 * std::max(1.0, std::fabs(upper));
            double zhint = kNaN;
            double prev_h = summary_.h_star;
            double prev_f = zs - z;
            for (int i = 1; i <= n; ++i) {
                const double d = width * std::pow(d_lo / width, i / static_cast<double>(n));
                const double h = upper - d;
                if (h <= prev_h) continue;
                const double fv = f_value_at(h, &zhint) - z;
                if ((prev_f > 0.0) != (fv > 0.0)) {
                    roots.push_back(bisect(
                        [&](double x) { return f_value_at(x, &zhint) - z; }, prev_h, h, 80));
                }
                prev_h = h;
                prev_f = fv;
            }
        }
    } else {
        // z above the edge: any roots must lie beyond h_star (they are the
        // source of critical points of E without a matching minimum).
        const double upper = summary_.f_domain_upper;
        const int n = 384;
        const double d_lo = 1e-13 * std::max(1.0, std::fabs(upper));
        const double d_hi = 100.0 * scale_;
        double zhint = kNaN;
        double prev_h = upper - d_hi;
        double prev_f = f_value_at(prev_h, &zhint) - z;
        for (int i = 1; i <= n; ++i) {
            const double d = d_hi * std::pow(d_lo / d_hi, i / static_cast<double>(n));
            const double h = upper - d;
            if (h <= prev_h) continue;
            const double fv = f_value_at(h, &zhint) - z;
            if ((prev_f > 0.0) != (fv > 0.0)) {
                roots.push_back(bisect(
                    [&](double x) { return f_value_at(x, &zhint) - z; }, prev_h, h, 80));
            }
            prev_h = h;
            prev_f = fv;
        }
    }

    std::vector<double> gs;
    gs.reserve(roots.size());
    for (double h : roots) gs.push_back(g_value(nu_, h));
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end(),
                         [](double a, double b) { return std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(a)); }),
             gs.end());

    if (gs.empty()) return report;

    // Kinds from the sign of E' sampled between consecutive critical points.
    const double e_hi = e_domain_upper(z);
    auto sign_at = [&](double g) { return e_deriv_sign_probe(z, g); };
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const double left_probe = (i == 0) ? 0.5 * gs[0] : 0.5 * (gs[i - 1] + gs[i]);
        double right_bound = (i + 1 < gs.size()) ? gs[i + 1] : std::min(e_hi, gs[i] + scale_);
        if (!std::isfinite(right_bound)) right_bound = gs[i] + scale_;
        const double right_probe = 0.5 * (gs[i] + right_bound);
        const double sl = sign_at(left_probe);
        const double sr = sign_at(right_probe);
        CriticalKind kind = CriticalKind::Inflection;
        if (sl < 0.0 && sr > 0.0)
            kind = CriticalKind::LocalMin;
        else if (sl > 0.0 && sr < 0.0)
            kind = CriticalKind::LocalMax;
        report.points.push_back({gs[i], kind, CriticalSource::FixedPoint});
    }
    return report;
}

double f_value(const Measure& mu, const Measure& nu, double h) {
    return FreeConvolution(mu, nu).f_value(h);
}

double f_deriv(const Measure& mu, const Measure& nu, double h) {
    return FreeConvolution(mu, nu).f_deriv(h);
}

ConvolutionSummary endpoint_summary(const Measure& mu, const Measure& nu) {
    return FreeConvolution(mu, nu).summary();
}

ConvRoot conv_stieltjes(const Measure& mu, const Measure& nu, double z) {
    return FreeConvolution(mu, nu).stieltjes(z);
}

std::optional<double> h_greater(const Measure& mu, const Measure& nu, double z) {
    return FreeConvolution(mu, nu).h_greater(z);
}

CriticalPointReport classify_critical_points(const Measure& mu, const Measure& nu, double z) {
    return FreeConvolution(mu, nu).classify(z);
}

} // namespace fpconv
