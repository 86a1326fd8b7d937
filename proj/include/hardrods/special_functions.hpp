#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hardrods {

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Inverse standard normal CDF. Acklam's rational approximation polished with
// one Halley step; good to ~1e-15 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must be in (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    double e = normal_cdf(x) - p;
    double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

// Chi-square quantile via the Wilson-Hilferty cube approximation; adequate for
// the 4-sigma-equivalent coverage used by the variance tests (dof >= 30).
inline double chi_square_quantile(double p, double dof) {
    if (dof <= 0.0) throw std::domain_error("chi_square_quantile: dof must be positive");
    double z = normal_quantile(p);
    double t = 2.0 / (9.0 * dof);
    double cube = 1.0 - t + z * std::sqrt(t);
    double v = dof * cube * cube * cube;
    return v > 0.0 ? v : 0.0;
}

// Wilson-Hilferty z-equivalent for testing a sample variance against a target.
// X = dof * s2 / target is chi-square(dof) under the null.
inline double variance_z_equivalent(double s2, double target, double dof) {
    if (target <= 0.0) throw std::domain_error("variance_z_equivalent: target must be positive");
    double x = dof * s2 / target;
    double t = 2.0 / (9.0 * dof);
    return (std::cbrt(x / dof) - (1.0 - t)) / std::sqrt(t);
}

} // namespace hardrods
