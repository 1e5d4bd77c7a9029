#ifndef FPCONV_RTRANSFORM_HPP
#define FPCONV_RTRANSFORM_HPP

#include <array>
#include <optional>

#include "fpconv/measure.hpp"
#include "fpconv/stieltjes.hpp"

namespace fpconv {

// Open interval, endpoints possibly infinite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double t) const { return t > lo && t < hi; }
};

// The R-transform of a measure as a real analytic function:
//   R(t) = Ginv(-t) - 1/t on dhat = (-g_star, -g_plus),
// extended to a larger interval when a closed form declares one
// (semicircle: all of R, Marchenko-Pastur: (-inf, 1)). On dhat the
// function is strictly increasing.
//
// Edge data and low moments are cached at construction; instances are
// immutable afterwards and safe to share across threads.
class RTransformReal {
public:
    explicit RTransformReal(Measure m);

    double value(double t) const;
    double deriv(double t) const;

    const Interval& dhat() const { return dhat_; }
    const std::optional<Interval>& extended_domain() const { return d_ext_; }
    // Domain used for all downstream dom(F) / E-domain logic: the extension
    // when present, dhat otherwise.
    const Interval& domain() const { return d_ext_ ? *d_ext_ : dhat_; }

    bool d_plus_contains(double t) const;

    const Measure& measure() const { return measure_; }
    const StieltjesEdgeData& edge() const { return edge_; }

private:
    double value_numeric(double t) const;
    double deriv_numeric(double t) const;
    double series_value(double t) const;
    double series_deriv(double t) const;

    Measure measure_;
    StieltjesEdgeData edge_;
    Interval dhat_;
    std::optional<Interval> d_ext_;
    std::array<double, 4> cumulants_{}; // free cumulants k1..k4
};

} // namespace fpconv

#endif
