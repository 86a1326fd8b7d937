#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardrods/measures.hpp"
#include "hardrods/test_function.hpp"

namespace hardrods {

// Projection P phi(x) = (rho / sigma) * iint r phi(x, v', r') dmu(v', r').
// Returns a callable of (x, v, r) that is constant in the marks. Undefined at
// sigma = 0.
template <class F>
auto project_P(F phi, double rho, double sigma, const VelocityLengthMeasure& mu) {
    if (!(sigma > 0.0)) throw std::domain_error("project_P: undefined for sigma <= 0");
    return [phi = std::move(phi), rho, sigma, &mu](double x, double, double) {
        return (rho / sigma) *
               mu.moment([&](double v, double r) { return r * phi(x, v, r); });
    };
}

namespace detail {

// (C phi)(y, v, r) = phi(y, v, r) - rho/(1+sigma) * iint r' phi(y, v', r') dmu,
// since (sigma/(1+sigma)) * (rho/sigma) = rho/(1+sigma). At sigma = 0 the
// projection term vanishes and C is the identity.
inline double c_coefficient(const MacroParams& p) {
    return p.sigma > 0.0 ? p.rho / (1.0 + p.sigma) : 0.0;
}

} // namespace detail

// Limit covariance of the static fluctuation field:
//   rho_bar * iint r^2 (C phi)(y,v,r) (C psi)(y,v,r) dy dmu(v,r)
// by nested quadrature (spatial panels x mark rule).
inline double theoretical_covariance(const TestFunction& phi, const TestFunction& psi,
                                     const MacroParams& p, const VelocityLengthMeasure& mu,
                                     VelocityBounds vb) {
    if (phi.empty() || psi.empty()) return 0.0;
    auto [plo, phi_hi] = phi.spatial_support(vb);
    auto [qlo, qhi] = psi.spatial_support(vb);
    const double lo = std::max(plo, qlo);
    const double hi = std::min(phi_hi, qhi);
    if (hi <= lo) return 0.0; // disjoint spatial supports

    std::vector<double> breaks = phi.spatial_breakpoints(mu.velocity_atoms());
    auto b2 = psi.spatial_breakpoints(mu.velocity_atoms());
    breaks.insert(breaks.end(), b2.begin(), b2.end());

    const double cc = detail::c_coefficient(p);
    double integral = integrate_with_breaks(
        [&](double y) {
            const double m_phi = cc != 0.0
                ? mu.moment([&](double v, double r) { return r * phi(y, v, r); })
                : 0.0;
            const double m_psi = cc != 0.0
                ? mu.moment([&](double v, double r) { return r * psi(y, v, r); })
                : 0.0;
            return mu.moment([&](double v, double r) {
                const double cphi = phi(y, v, r) - cc * m_phi;
                const double cpsi = psi(y, v, r) - cc * m_psi;
                return r * r * cphi * cpsi;
            });
        },
        lo, hi, breaks);
    return p.rho_bar * integral;
}

// Gram matrix of theoretical covariances over a family of test functions.
inline std::vector<std::vector<double>> covariance_gram(
    const std::vector<TestFunction>& family, const MacroParams& p,
    const VelocityLengthMeasure& mu, VelocityBounds vb) {
    const std::size_t n = family.size();
    std::vector<std::vector<double>> g(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            g[i][j] = theoretical_covariance(family[i], family[j], p, mu, vb);
            g[j][i] = g[i][j];
        }
    return g;
}

} // namespace hardrods
