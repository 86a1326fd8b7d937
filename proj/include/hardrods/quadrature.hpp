#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hardrods {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1], weight 1. Newton on the three-term recurrence.
inline QuadRule make_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("make_gauss_legendre: n >= 1 required");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Gauss-Hermite, weight exp(-x^2) on the real line, orthonormal recurrence to
// keep the iterates bounded at n = 64.
inline QuadRule make_gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("make_gauss_hermite: n >= 1 required");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = 0.7511255444649425; // pi^(-1/4)
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[n - 1];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[n - 2];
        else
            z = 2.0 * z - rule.nodes[n - i + 1];

        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-14) break;
        }
        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        rule.weights[n - 1 - i] = 2.0 / (pp * pp);
        rule.weights[i] = rule.weights[n - 1 - i];
    }
    return rule;
}

// Gauss-Laguerre, weight exp(-x) on [0, inf).
inline QuadRule make_gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("make_gauss_laguerre: n >= 1 required");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else {
            double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
        }
        double pp = 0.0, p2 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (p1 - p2) / z;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14 * z) break;
        }
        rule.nodes[i] = z;
        rule.weights[i] = -1.0 / (pp * n * p2);
    }
    return rule;
}

inline const QuadRule& gauss_legendre_64() {
    static const QuadRule rule = make_gauss_legendre(64);
    return rule;
}

inline const QuadRule& gauss_hermite_64() {
    static const QuadRule rule = make_gauss_hermite(64);
    return rule;
}

inline const QuadRule& gauss_laguerre_64() {
    static const QuadRule rule = make_gauss_laguerre(64);
    return rule;
}

// Composite Gauss-Legendre over [a, b].
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const QuadRule& rule) {
    if (b <= a) return 0.0;
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += half * acc;
    }
    return total;
}

inline const QuadRule& gauss_legendre_16() {
    static const QuadRule rule = make_gauss_legendre(16);
    return rule;
}

// Integrate over [a, b] split at the given breakpoints, so integrands that
// lose smoothness there (compact bump edges, |.| kinks) never straddle a
// panel.
template <class F>
double integrate_with_breaks(F&& f, double a, double b, std::span<const double> breaks,
                             int panels_per_unit = 4, int min_panels = 4) {
    if (b <= a) return 0.0;
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const QuadRule& rule = gauss_legendre_16();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (hi - lo < 1e-300) continue;
        int panels = std::max(min_panels, std::min(256, int(std::ceil((hi - lo) * panels_per_unit))));
        total += integrate_panels(f, lo, hi, panels, rule);
    }
    return total;
}

} // namespace hardrods
