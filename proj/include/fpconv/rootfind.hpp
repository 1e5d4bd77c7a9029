#ifndef FPCONV_ROOTFIND_HPP
#define FPCONV_ROOTFIND_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fpconv/errors.hpp"

namespace fpconv {

// Newton iteration safeguarded by a shrinking bracket. The bracket [lo, hi]
// must satisfy f(lo)*f(hi) <= 0; a Newton step that leaves the current
// bracket, or that fails to halve the residual fast enough, is replaced by a
// bisection step. Returns the abscissa with |f| <= ftol or the bracket
// midpoint once the bracket width drops below xtol.
inline double find_root(const std::function<double(double)>& f,
                        const std::function<double(double)>& df,
                        double lo, double hi,
                        double xtol, double ftol,
                        int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw OutOfRange("find_root: bracket does not straddle a root");
    if (flo > 0.0) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    double x = 0.5 * (lo + hi);
    double dx_prev = std::fabs(hi - lo);
    double dx = dx_prev;
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fx) <= ftol) return x;
        const double dfx = df(x);
        const bool newton_ok =
            dfx != 0.0 && std::isfinite(dfx) &&
            ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0.0 &&
            std::fabs(2.0 * fx) <= std::fabs(dx_prev * dfx);
        dx_prev = dx;
        if (newton_ok) {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if (std::fabs(hi - lo) <= xtol) return x;
        fx = f(x);
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
    }
    return x;
}

// Bisection on a sign change; 'iters' halvings of the bracket.
inline double bisect(const std::function<double(double)>& f,
                     double lo, double hi, int iters = 64) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimization of a unimodal function on [a, b].
inline double golden_section_min(const std::function<double(double)>& f,
                                 double a, double b, double xtol,
                                 int max_iter = 200) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Aitken delta-squared acceleration of a convergent sequence. Applied
// repeatedly; returns the most extrapolated finite value. Works for any
// sequence with a dominant geometric error term, which covers power-law
// approach F(h0 - d*r^k) -> lim when d^p terms dominate.
inline double aitken_limit(std::vector<double> s) {
    while (s.size() >= 3) {
        std::vector<double> t;
        for (std::size_t i = 0; i + 2 < s.size(); ++i) {
            const double d2 = s[i + 2] - 2.0 * s[i + 1] + s[i];
            double v = (d2 != 0.0) ? s[i + 2] - (s[i + 2] - s[i + 1]) * (s[i + 2] - s[i + 1]) / d2
                                   : s[i + 2];
            if (!std::isfinite(v)) v = s[i + 2];
            t.push_back(v);
        }
        s = std::move(t);
    }
    return s.back();
}

} // namespace fpconv

#endif
