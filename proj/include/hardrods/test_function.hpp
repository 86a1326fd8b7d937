#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardrods/measures.hpp"

namespace hardrods {

enum class SpatialKind { gaussian_bump, cosine_packet, poly_bump };

// Spatial factor f(y): a smooth bump, optionally differentiated once or
// twice. gaussian/cosine factors are cut off where |f| < 1e-14; poly_bump is
// exactly compact.
struct SpatialFactor {
    SpatialKind kind = SpatialKind::gaussian_bump;
    double center = 0.0;
    double width = 1.0;
    double wavenumber = 0.0;
    int deriv_order = 0;

    void validate() const {
        if (!(width > 0.0)) throw std::invalid_argument("spatial factor width must be positive");
        if (deriv_order < 0 || deriv_order > 2)
            throw std::invalid_argument("spatial factor supports derivatives of order <= 2");
    }

    double operator()(double y) const {
        const double u = (y - center) / width;
        switch (kind) {
        case SpatialKind::gaussian_bump: {
            const double g = std::exp(-0.5 * u * u);
            if (deriv_order == 0) return g;
            if (deriv_order == 1) return -u / width * g;
            return (u * u - 1.0) / (width * width) * g;
        }
        case SpatialKind::cosine_packet: {
            const double g = std::exp(-0.5 * u * u);
            const double ph = wavenumber * (y - center);
            if (deriv_order == 0) return std::cos(ph) * g;
            if (deriv_order == 1)
                return (-wavenumber * std::sin(ph) - u / width * std::cos(ph)) * g;
            return ((u * u - 1.0) / (width * width) * std::cos(ph) -
                    wavenumber * wavenumber * std::cos(ph) +
                    2.0 * wavenumber * u / width * std::sin(ph)) * g;
        }
        case SpatialKind::poly_bump: {
            if (std::abs(u) >= 1.0) return 0.0;
            const double s = 1.0 - u * u;
            if (deriv_order == 0) return s * s * s;
            if (deriv_order == 1) return -6.0 * u * s * s / width;
            return (-6.0 * s * s + 24.0 * u * u * s) / (width * width);
        }
        }
        return 0.0;
    }

    double support_radius() const {
        if (kind == SpatialKind::poly_bump) return width;
        // solve exp(-u^2/2) * A < 1e-15 with A bounding the prefactors
        double amp = (1.0 + std::abs(wavenumber) * width) * (1.0 + 2.0 / width) * 8.0;
        double u = std::sqrt(2.0 * std::log(amp * 1e15));
        return u * width;
    }

    double support_lo() const { return center - support_radius(); }
    double support_hi() const { return center + support_radius(); }

    SpatialFactor derivative() const {
        SpatialFactor d = *this;
        d.deriv_order += 1;
        if (d.deriv_order > 2)
            throw std::invalid_argument("spatial factor supports derivatives of order <= 2");
        return d;
    }
};

struct Poly {
    std::vector<double> coef; // coef[i] * x^i

    Poly() : coef{1.0} {}
    explicit Poly(std::vector<double> c) : coef(std::move(c)) {
        if (coef.empty()) coef.push_back(0.0);
    }
    static Poly constant(double c) { return Poly({c}); }

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t i = coef.size(); i-- > 0;) acc = acc * x + coef[i];
        return acc;
    }

    Poly operator*(const Poly& o) const {
        std::vector<double> out(coef.size() + o.coef.size() - 1, 0.0);
        for (std::size_t i = 0; i < coef.size(); ++i)
            for (std::size_t j = 0; j < o.coef.size(); ++j)
                out[i + j] += coef[i] * o.coef[j];
        return Poly(std::move(out));
    }
};

// One separable term f(y + shift(v)) * g(v) * h(r), where shift(v) is the
// accumulated transport alpha*v + beta (zero when untransported).
struct TestTerm {
    double scale = 1.0;
    SpatialFactor spatial;
    Poly velocity_factor;
    Poly length_factor;
    double shift_alpha = 0.0;
    double shift_beta = 0.0;

    double operator()(double y, double v, double r) const {
        const double arg = y + shift_alpha * v + shift_beta;
        return scale * spatial(arg) * velocity_factor(v) * length_factor(r);
    }
};

struct VelocityBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Test function phi(y, v, r): a linear combination of separable terms.
// Transport keeps terms in this family because the effective velocity is
// affine in v.
class TestFunction {
public:
    TestFunction() = default;
    TestFunction(SpatialFactor f, Poly g, Poly h) {
        f.validate();
        terms_.push_back(TestTerm{1.0, f, std::move(g), std::move(h), 0.0, 0.0});
    }
    explicit TestFunction(std::vector<TestTerm> terms) : terms_(std::move(terms)) {
        for (auto& t : terms_) t.spatial.validate();
    }

    const std::vector<TestTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    double operator()(double y, double v, double r) const {
        double acc = 0.0;
        for (const auto& t : terms_) acc += t(y, v, r);
        return acc;
    }

    TestFunction operator+(const TestFunction& o) const {
        std::vector<TestTerm> out = terms_;
        out.insert(out.end(), o.terms_.begin(), o.terms_.end());
        return TestFunction(std::move(out));
    }

    TestFunction scaled(double c) const {
        std::vector<TestTerm> out = terms_;
        for (auto& t : out) t.scale *= c;
        return TestFunction(std::move(out));
    }

    TestFunction derivative_y() const {
        std::vector<TestTerm> out = terms_;
        for (auto& t : out) t.spatial = t.spatial.derivative();
        return TestFunction(std::move(out));
    }

    TestFunction multiplied_velocity(const Poly& p) const {
        std::vector<TestTerm> out = terms_;
        for (auto& t : out) t.velocity_factor = t.velocity_factor * p;
        return TestFunction(std::move(out));
    }

    // phi(. + s): a rigid spatial shift.
    TestFunction shifted(double s) const {
        std::vector<TestTerm> out = terms_;
        for (auto& t : out) t.shift_beta += s;
        return TestFunction(std::move(out));
    }

    // y-support [lo, hi] over marks with v in [vlo, vhi]; the transport shift
    // is affine so the extremes sit at the velocity endpoints.
    std::pair<double, double> spatial_support(VelocityBounds vb) const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& t : terms_) {
            double s1 = t.shift_alpha * vb.lo + t.shift_beta;
            double s2 = t.shift_alpha * vb.hi + t.shift_beta;
            double smin = std::min(s1, s2), smax = std::max(s1, s2);
            lo = std::min(lo, t.spatial.support_lo() - smax);
            hi = std::max(hi, t.spatial.support_hi() - smin);
        }
        if (terms_.empty()) { lo = 0.0; hi = 0.0; }
        return {lo, hi};
    }

    // Breakpoints in y where spatial smoothness can drop (poly_bump edges);
    // quadratures split panels here. For transported terms the edges shift per
    // velocity atom; averaging over a continuous velocity law smooths the kink
    // away, so only atoms contribute.
    std::vector<double> spatial_breakpoints(const std::vector<double>& velocity_atoms = {}) const {
        std::vector<double> out;
        for (const auto& t : terms_) {
            if (t.spatial.kind != SpatialKind::poly_bump) continue;
            if (t.shift_alpha == 0.0) {
                out.push_back(t.spatial.support_lo() - t.shift_beta);
                out.push_back(t.spatial.support_hi() - t.shift_beta);
            } else {
                for (double va : velocity_atoms) {
                    double s = t.shift_alpha * va + t.shift_beta;
                    out.push_back(t.spatial.support_lo() - s);
                    out.push_back(t.spatial.support_hi() - s);
                }
            }
        }
        return out;
    }

private:
    std::vector<TestTerm> terms_;
};

// phi_t(y, v, r) = phi(y + v_eff(v) t, v, r).
inline TestFunction transported(const TestFunction& phi, double t, const MacroParams& p) {
    std::vector<TestTerm> out = phi.terms();
    for (auto& term : out) {
        term.shift_alpha += (1.0 + p.sigma) * t;
        term.shift_beta += -p.pi * t;
    }
    return TestFunction(std::move(out));
}

// <phi> = rho * iint r phi(y, v, r) dy dmu(v, r).
inline double phi_mean(const TestFunction& phi, const MacroParams& p,
                       const VelocityLengthMeasure& mu, VelocityBounds vb) {
    if (phi.empty()) return 0.0;
    auto [lo, hi] = phi.spatial_support(vb);
    auto breaks = phi.spatial_breakpoints(mu.velocity_atoms());
    double spatial = integrate_with_breaks(
        [&](double y) {
            return mu.moment([&](double v, double r) { return r * phi(y, v, r); });
        },
        lo, hi, breaks);
    return p.rho * spatial;
}

} // namespace hardrods
