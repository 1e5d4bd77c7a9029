#include "fpconv/rtransform.hpp"

#include <cmath>

#include "fpconv/errors.hpp"

namespace fpconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesRadius = 1e-3; // pure moment series below this |t|
constexpr double kBlendRadius = 2e-3;  // direct formula above this |t|

} // namespace

RTransformReal::RTransformReal(Measure m)
    : measure_(std::move(m)), edge_(edge_data(measure_)) {
    dhat_ = {-edge_.g_star, -edge_.g_plus};
    switch (measure_.kind()) {
        case MeasureKind::Semicircle:
            d_ext_ = Interval{-kInf, kInf};
            break;
        case MeasureKind::MarchenkoPastur:
            d_ext_ = Interval{-kInf, 1.0};
            break;
        default:
            d_ext_.reset();
    }
    // Free cumulants from raw moments; they drive the small-t series that
    // removes the 0/0 at t = 0 in the numeric path.
    const double m1 = moment(measure_, 1);
    const double m2 = moment(measure_, 2);
    const double m3 = moment(measure_, 3);
    const double m4 = moment(measure_, 4);
    const double k1 = m1;
    const double k2 = m2 - m1 * m1;
    const double k3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    const double k4 = m4 - 4.0 * m1 * k3 - 2.0 * k2 * k2 - 6.0 * m1 * m1 * k2 -
                      m1 * m1 * m1 * m1;
    cumulants_ = {k1, k2, k3, k4};
}

double RTransformReal::series_value(double t) const {
    return cumulants_[0] + t * (cumulants_[1] + t * (cumulants_[2] + t * cumulants_[3]));
}

double RTransformReal::series_deriv(double t) const {
    return cumulants_[1] + t * (2.0 * cumulants_[2] + t * 3.0 * cumulants_[3]);
}

double RTransformReal::value_numeric(double t) const {
    // Ginv(-t) - 1/t cancels catastrophically as t -> 0; blend into the
    // moment series there.
    const double at = std::fabs(t);
    auto direct = [&](double u) {
        const double g = -u;
        const double z = g > 0.0 ? g_inverse(measure_, g) : g_inverse_right(measure_, g);
        return z + 1.0 / g;
    };
    if (at <= kSeriesRadius) return series_value(t);
    if (at >= kBlendRadius) return direct(t);
    const double w = (at - kSeriesRadius) / (kBlendRadius - kSeriesRadius);
    return (1.0 - w) * series_value(t) + w * direct(t);
}

double RTransformReal::deriv_numeric(double t) const {
    const double at = std::fabs(t);
    auto direct = [&](double u) {
        const double g = -u;
        const double z = g > 0.0 ? g_inverse(measure_, g) : g_inverse_right(measure_, g);
        return -1.0 / g_deriv(measure_, z, 1) + 1.0 / (u * u);
    };
    if (at <= kSeriesRadius) return series_deriv(t);
    if (at >= kBlendRadius) return direct(t);
    const double w = (at - kSeriesRadius) / (kBlendRadius - kSeriesRadius);
    return (1.0 - w) * series_deriv(t) + w * direct(t);
}

double RTransformReal::value(double t) const {
    switch (measure_.kind()) {
        case MeasureKind::Semicircle:
            return t * measure_.beta() * measure_.beta();
        case MeasureKind::MarchenkoPastur:
            if (!(t < 1.0)) throw OutOfDomain("R_mp is defined on (-inf, 1)");
            return measure_.beta() / (1.0 - t);
        default:
            if (!dhat_.contains(t))
                throw OutOfDomain("t outside the R-transform domain of " + measure_.describe());
            return value_numeric(t);
    }
}

double RTransformReal::deriv(double t) const {
    switch (measure_.kind()) {
        case MeasureKind::Semicircle:
            return measure_.beta() * measure_.beta();
        case MeasureKind::MarchenkoPastur: {
            if (!(t < 1.0)) throw OutOfDomain("R_mp is defined on (-inf, 1)");
            const double d = 1.0 - t;
            return measure_.beta() / (d * d);
        }
        default:
            if (!dhat_.contains(t))
                throw OutOfDomain("t outside the R-transform domain of " + measure_.describe());
            return deriv_numeric(t);
    }
}

bool RTransformReal::d_plus_contains(double t) const {
    if (!domain().contains(t)) return false;
    switch (measure_.kind()) {
        case MeasureKind::Semicircle:
            return true;
        case MeasureKind::MarchenkoPastur:
            return true; // beta / (1-t)^2 > 0 on the whole domain
        default:
            return deriv(t) > 0.0; // guaranteed on dhat, checked anyway
    }
}

double g_inverse_extended(const Measure& m, double g) {
    if (g == 0.0) throw OutOfDomain("g_inverse_extended: g must be nonzero");
    switch (m.kind()) {
        case MeasureKind::Semicircle:
            return -m.beta() * m.beta() * g - 1.0 / g;
        case MeasureKind::MarchenkoPastur:
            if (!(-g < 1.0)) throw OutOfDomain("g_inverse_extended: -g must be below 1");
            return m.beta() / (1.0 + g) - 1.0 / g;
        default: {
            const RTransformReal rt(m);
            return rt.value(-g) - 1.0 / g;
        }
    }
}

} // namespace fpconv
