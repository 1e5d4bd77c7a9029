#include "fpconv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "fpconv/errors.hpp"
#include "fpconv/quadrature.hpp"
#include "fpconv/rootfind.hpp"

namespace fpconv {

namespace {

double log_beta(double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

} // namespace

Measure Measure::atomic(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ConfigError("atomic measure needs at least one atom");
    double mass = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        check_finite(atoms[i].location, "atom location");
        if (!(atoms[i].weight > 0.0)) throw ConfigError("atom weights must be positive");
        if (i > 0 && !(atoms[i].location > atoms[i - 1].location))
            throw ConfigError("atom locations must be strictly increasing");
        mass += atoms[i].weight;
    }
    if (std::fabs(mass - 1.0) > 1e-9)
        throw ConfigError("atom weights must sum to 1 (got " + std::to_string(mass) + ")");
    for (auto& a : atoms) a.weight /= mass;
    Measure m;
    m.kind_ = MeasureKind::Atomic;
    m.atoms_ = std::move(atoms);
    return m;
}

Measure Measure::point_mass(double location) {
    return atomic({{location, 1.0}});
}

Measure Measure::two_atoms(double x1, double x2) {
    if (x1 > x2) std::swap(x1, x2);
    return atomic({{x1, 0.5}, {x2, 0.5}});
}

Measure Measure::semicircle(double beta) {
    check_finite(beta, "beta");
    if (!(beta > 0.0)) throw ConfigError("semicircle beta must be > 0");
    Measure m;
    m.kind_ = MeasureKind::Semicircle;
    m.beta_ = beta;
    return m;
}

Measure Measure::marchenko_pastur(double beta) {
    check_finite(beta, "beta");
    if (!(beta > 0.0)) throw ConfigError("marchenko_pastur beta must be > 0");
    Measure m;
    m.kind_ = MeasureKind::MarchenkoPastur;
    m.beta_ = beta;
    return m;
}

Measure Measure::jacobi(double a, double b, double p, double q) {
    check_finite(a, "a");
    check_finite(b, "b");
    if (!(b > a)) throw ConfigError("jacobi needs b > a");
    if (!(p > -1.0) || !(q > -1.0)) throw ConfigError("jacobi needs p, q > -1");
    Measure m;
    m.kind_ = MeasureKind::JacobiDensity;
    m.a_ = a;
    m.b_ = b;
    m.p_ = p;
    m.q_ = q;
    // int_a^b (x-a)^p (b-x)^q dx = (b-a)^(p+q+1) B(p+1, q+1)
    m.c_ = std::exp(-(p + q + 1.0) * std::log(b - a) - log_beta(p + 1.0, q + 1.0));
    return m;
}

SupportInterval Measure::support() const {
    switch (kind_) {
        case MeasureKind::Atomic:
            return {atoms_.front().location, atoms_.back().location};
        case MeasureKind::Semicircle:
            return {-2.0 * beta_, 2.0 * beta_};
        case MeasureKind::MarchenkoPastur: {
            const double sq = std::sqrt(beta_);
            const double lo = beta_ < 1.0 ? 0.0 : (1.0 - sq) * (1.0 - sq);
            return {lo, (1.0 + sq) * (1.0 + sq)};
        }
        case MeasureKind::JacobiDensity:
            return {a_, b_};
    }
    throw Error("unreachable");
}

bool Measure::is_degenerate() const {
    return kind_ == MeasureKind::Atomic && atoms_.size() == 1;
}

double Measure::beta() const {
    if (kind_ != MeasureKind::Semicircle && kind_ != MeasureKind::MarchenkoPastur)
        throw Error("beta() only defined for semicircle / marchenko_pastur");
    return beta_;
}

const std::vector<Atom>& Measure::atoms() const {
    if (kind_ != MeasureKind::Atomic) throw Error("atoms() only defined for atomic measures");
    return atoms_;
}

double Measure::lower_edge_atom() const {
    if (kind_ == MeasureKind::Atomic) return atoms_.front().weight;
    if (kind_ == MeasureKind::MarchenkoPastur && beta_ < 1.0) return 1.0 - beta_;
    return 0.0;
}

std::string Measure::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case MeasureKind::Atomic:
            os << "atomic[";
            for (std::size_t i = 0; i < atoms_.size(); ++i)
                os << (i ? ", " : "") << "(" << atoms_[i].location << "," << atoms_[i].weight << ")";
            os << "]";
            break;
        case MeasureKind::Semicircle:
            os << "semicircle(beta=" << beta_ << ")";
            break;
        case MeasureKind::MarchenkoPastur:
            os << "marchenko_pastur(beta=" << beta_ << ")";
            break;
        case MeasureKind::JacobiDensity:
            os << "jacobi(a=" << a_ << ", b=" << b_ << ", p=" << p_ << ", q=" << q_ << ")";
            break;
    }
    return os.str();
}

SupportInterval support(const Measure& m) { return m.support(); }

namespace {

// Continuous-part integral for the semicircle law via Chebyshev-2 nodes,
// with adaptive order doubling. Integrands the spectral rule cannot settle
// (hidden near-edge singularities) are declined and retried on the
// double-exponential rule by the caller.
std::optional<double> integrate_semicircle(double beta,
                                           const std::function<double(double)>& f) {
    double prev = 0.0;
    for (int n = 64; n <= 1024; n *= 2) {
        const auto rule = quad::gauss_chebyshev2(n);
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += rule.weights[i] * f(2.0 * beta * rule.nodes[i]);
        const double val = (2.0 / std::numbers::pi) * sum;
        if (n > 64 && std::fabs(val - prev) <= 1e-12 * std::max(1.0, std::fabs(val)))
            return val;
        prev = val;
    }
    return std::nullopt;
}

// Continuous part of the Marchenko-Pastur law away from the origin: the
// density is sqrt(1-x^2) times a smooth factor after mapping to [-1, 1].
std::optional<double> integrate_mp_smooth(double beta,
                                          const std::function<double(double)>& f) {
    const double sq = std::sqrt(beta);
    const double mid = 1.0 + beta;
    const double rad = 2.0 * sq;
    double prev = 0.0;
    for (int n = 64; n <= 1024; n *= 2) {
        const auto rule = quad::gauss_chebyshev2(n);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lam = mid + rad * rule.nodes[i];
            sum += rule.weights[i] * f(lam) / lam;
        }
        const double val = rad * rad / (2.0 * std::numbers::pi) * sum;
        if (n > 64 && std::fabs(val - prev) <= 1e-12 * std::max(1.0, std::fabs(val)))
            return val;
        prev = val;
    }
    return std::nullopt;
}

} // namespace

double integrate(const Measure& m, const std::function<double(double)>& f,
                 EdgeSingularity singular) {
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            double sum = 0.0;
            for (const auto& a : m.atoms()) {
                const double v = f(a.location);
                if (!std::isfinite(v)) throw NonIntegrable("integrand not finite at an atom");
                sum += a.weight * v;
            }
            return sum;
        }
        case MeasureKind::Semicircle: {
            const double beta = m.beta();
            if (singular == EdgeSingularity::None) {
                if (const auto fast = integrate_semicircle(beta, f)) return *fast;
            }
            // 4 b^2 - x^2 = (x + 2b)(2b - x): square-root edge weights.
            auto g = [&](double x) { return f(x) / (2.0 * std::numbers::pi * beta * beta); };
            return quad::tanh_sinh_weighted(g, -2.0 * beta, 2.0 * beta, 0.5, 0.5);
        }
        case MeasureKind::MarchenkoPastur: {
            const double beta = m.beta();
            const auto sup = m.support();
            const double sq = std::sqrt(beta);
            const double lm = (1.0 - sq) * (1.0 - sq);
            const double lp = (1.0 + sq) * (1.0 + sq);
            double atom_part = 0.0;
            if (beta < 1.0) {
                const double v = f(0.0);
                if (!std::isfinite(v)) throw NonIntegrable("integrand not finite at the atom");
                atom_part = (1.0 - beta) * v;
            }
            (void)sup;
            // The 1/x factor turns into a near-edge pole as beta -> 1; the
            // double-exponential rule absorbs it (x stays exact relative to
            // the origin), the Chebyshev rule does not.
            const bool near_hard_origin = lm < 0.01 * (lp - lm);
            if (singular == EdgeSingularity::None && !near_hard_origin) {
                if (const auto fast = integrate_mp_smooth(beta, f)) return atom_part + *fast;
            }
            auto g = [&](double x) { return f(x) / (2.0 * std::numbers::pi * x); };
            return atom_part + quad::tanh_sinh_weighted(g, lm, lp, 0.5, 0.5);
        }
        case MeasureKind::JacobiDensity: {
            const double c = m.jacobi_c();
            auto g = [&](double x) { return c * f(x); };
            return quad::tanh_sinh_weighted(g, m.jacobi_a(), m.jacobi_b(), m.jacobi_p(),
                                            m.jacobi_q());
        }
    }
    throw Error("unreachable");
}

namespace {

// Catalan numbers C_0..C_4 for the semicircle moments.
constexpr double kCatalan[] = {1.0, 1.0, 2.0, 5.0, 14.0};

double narayana(int k, int j) {
    // N(k, j) = (1/k) C(k, j) C(k, j-1)
    auto binom = [](int n, int r) {
        double v = 1.0;
        for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
        return v;
    };
    return binom(k, j) * binom(k, j - 1) / k;
}

} // namespace

double moment(const Measure& m, int k) {
    if (k < 0) throw ConfigError("moment order must be non-negative");
    if (k == 0) return 1.0;
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            double sum = 0.0;
            for (const auto& a : m.atoms()) sum += a.weight * std::pow(a.location, k);
            return sum;
        }
        case MeasureKind::Semicircle: {
            if (k % 2 == 1) return 0.0;
            const int half = k / 2;
            if (half <= 4) return kCatalan[half] * std::pow(m.beta(), k);
            break;
        }
        case MeasureKind::MarchenkoPastur: {
            if (k <= 8) {
                double sum = 0.0;
                for (int j = 1; j <= k; ++j) sum += narayana(k, j) * std::pow(m.beta(), j);
                return sum;
            }
            break;
        }
        case MeasureKind::JacobiDensity:
            break;
    }
    return integrate(m, [k](double x) { return std::pow(x, k); });
}

double cdf(const Measure& m, double x) {
    const auto sup = m.support();
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            double sum = 0.0;
            for (const auto& a : m.atoms())
                if (a.location <= x) sum += a.weight;
            return sum;
        }
        case MeasureKind::Semicircle: {
            const double beta = m.beta();
            if (x <= sup.lower) return 0.0;
            if (x >= sup.upper) return 1.0;
            // Closed-form antiderivative of the density.
            const double r = 2.0 * beta;
            return 0.5 + (x * std::sqrt(r * r - x * x) + r * r * std::asin(x / r)) /
                             (2.0 * std::numbers::pi * beta * beta);
        }
        case MeasureKind::MarchenkoPastur:
        case MeasureKind::JacobiDensity: {
            double atom_part = 0.0;
            double lo = sup.lower;
            if (m.kind() == MeasureKind::MarchenkoPastur) {
                const double beta = m.beta();
                const double sq = std::sqrt(beta);
                lo = (1.0 - sq) * (1.0 - sq);
                if (beta < 1.0 && x >= 0.0) atom_part = 1.0 - beta;
            }
            if (x <= lo) return atom_part;
            if (x >= sup.upper) return 1.0;
            if (m.kind() == MeasureKind::MarchenkoPastur) {
                const double beta = m.beta();
                const double sq = std::sqrt(beta);
                const double lp = (1.0 + sq) * (1.0 + sq);
                auto g = [&](double t) {
                    return std::sqrt(std::max(lp - t, 0.0)) / (2.0 * std::numbers::pi * t);
                };
                return atom_part + quad::tanh_sinh_weighted(g, lo, x, 0.5, 0.0, 1e-12);
            }
            auto g = [&](double t) {
                return m.jacobi_c() * std::pow(m.jacobi_b() - t, m.jacobi_q());
            };
            return atom_part + quad::tanh_sinh_weighted(g, lo, x, m.jacobi_p(), 0.0, 1e-12);
        }
    }
    throw Error("unreachable");
}

std::vector<double> diagonal_quantiles(const Measure& m, int n) {
    if (n < 1) throw ConfigError("need at least one quantile");
    std::vector<double> out;
    out.reserve(n);
    if (m.kind() == MeasureKind::Atomic) {
        const auto& atoms = m.atoms();
        std::size_t j = 0;
        double cum = atoms[0].weight;
        for (int i = 0; i < n; ++i) {
            const double p = (i + 0.5) / n;
            while (cum < p && j + 1 < atoms.size()) cum += atoms[++j].weight;
            out.push_back(atoms[j].location);
        }
        return out;
    }
    const auto sup = m.support();
    double lo = sup.lower;
    for (int i = 0; i < n; ++i) {
        const double p = (i + 0.5) / n;
        if (cdf(m, sup.lower) >= p) {
            out.push_back(sup.lower);
            continue;
        }
        double a = lo, b = sup.upper;
        for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::fabs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            (cdf(m, mid) < p ? a : b) = mid;
        }
        const double qv = 0.5 * (a + b);
        out.push_back(qv);
        lo = a; // quantiles are requested in ascending order
    }
    return out;
}

} // namespace fpconv
