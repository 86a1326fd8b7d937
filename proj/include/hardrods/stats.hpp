#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hardrods/exact_sum.hpp"
#include "hardrods/special_functions.hpp"

namespace hardrods {

// Monte Carlo aggregate of one scalar statistic. Reductions run through exact
// accumulators, so the reported digits are invariant under any permutation of
// the replica results.
struct ReplicaStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double stderr_mean = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
};

inline ReplicaStats summarize(std::span<const double> values) {
    ReplicaStats s;
    s.n = values.size();
    if (s.n == 0) return s;
    ExactSum sum;
    for (double v : values) sum.add(v);
    s.mean = sum.value() / double(s.n);
    if (s.n >= 2) {
        ExactSum sq;
        for (double v : values) {
            const double d = v - s.mean;
            sq.add(d * d);
        }
        s.variance = sq.value() / double(s.n - 1);
        if (s.variance < 0.0) s.variance = 0.0;
    }
    s.stderr_mean = s.n >= 2 ? std::sqrt(s.variance / double(s.n)) : 0.0;
    const double half = 1.959963984540054 * s.stderr_mean;
    s.ci95_lo = s.mean - half;
    s.ci95_hi = s.mean + half;
    return s;
}

inline double covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("covariance: matched samples of size >= 2 required");
    ExactSum sa, sb;
    for (double v : a) sa.add(v);
    for (double v : b) sb.add(v);
    const double ma = sa.value() / double(a.size());
    const double mb = sb.value() / double(b.size());
    ExactSum cross;
    for (std::size_t i = 0; i < a.size(); ++i) cross.add((a[i] - ma) * (b[i] - mb));
    return cross.value() / double(a.size() - 1);
}

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    const double c = covariance(a, b);
    const double va = summarize(a).variance;
    const double vb = summarize(b).variance;
    if (!(va > 0.0 && vb > 0.0))
        throw std::domain_error("pearson_correlation: degenerate sample variance");
    return c / std::sqrt(va * vb);
}

// Column-major table of per-replica statistics.
struct ReplicaMatrix {
    std::size_t n = 0;
    std::size_t width = 0;
    std::vector<double> data; // data[col * n + row]

    std::span<const double> column(std::size_t c) const {
        return std::span<const double>(data.data() + c * n, n);
    }
};

// Execute n replicas of `body` (replica_index -> row of width statistics) on
// a small thread pool. Rows land in preassigned slots and every reduction
// downstream is exact, so results do not depend on thread count or schedule.
// A replica failure aborts the run naming the failing index.
template <class Body>
ReplicaMatrix run_replicas(Body&& body, std::size_t n, std::size_t width, int threads) {
    if (n < 2) throw std::invalid_argument("run_replicas: n >= 2 required");
    if (width == 0) throw std::invalid_argument("run_replicas: width >= 1 required");
    ReplicaMatrix mat;
    mat.n = n;
    mat.width = width;
    mat.data.assign(n * width, 0.0);

    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 2;
    const int nthreads = threads > 0 ? threads : hw;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::string> errors(nthreads);

    auto worker = [&](int tid) {
        std::vector<double> row(width);
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load(std::memory_order_relaxed)) break;
            try {
                body(i, std::span<double>(row));
                for (std::size_t c = 0; c < width; ++c) mat.data[c * n + i] = row[c];
            } catch (const std::exception& e) {
                errors[tid] = "replica " + std::to_string(i) + " failed: " + e.what();
                failed.store(true);
                break;
            }
        }
    };

    if (nthreads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int tidx = 0; tidx < nthreads; ++tidx) pool.emplace_back(worker, tidx);
        for (auto& th : pool) th.join();
    }

    if (failed.load()) {
        for (const auto& e : errors)
            if (!e.empty()) throw std::runtime_error(e);
        throw std::runtime_error("run_replicas: replica failure");
    }
    return mat;
}

struct Verdict {
    std::string test_id;
    double statistic = 0.0;
    double target = 0.0;
    double stderr_or_ci = 0.0;
    double z_or_chi2 = 0.0;
    bool pass = false;
};

constexpr double kSigmaThreshold = 4.0;

// Mean test: z = (mean - target) / stderr, pass iff |z| <= 4.
inline Verdict test_mean(std::string id, const ReplicaStats& s, double target) {
    if (s.n < 30) throw std::invalid_argument("test_mean: needs n >= 30");
    Verdict v;
    v.test_id = std::move(id);
    v.statistic = s.mean;
    v.target = target;
    v.stderr_or_ci = s.stderr_mean;
    v.z_or_chi2 = s.stderr_mean > 0.0 ? (s.mean - target) / s.stderr_mean
                                      : (s.mean == target ? 0.0 : INFINITY);
    v.pass = std::abs(v.z_or_chi2) <= kSigmaThreshold;
    return v;
}

// Mean test against a stderr predicted from theory rather than estimated.
inline Verdict test_mean_predicted(std::string id, double mean, double target,
                                   double predicted_stderr) {
    Verdict v;
    v.test_id = std::move(id);
    v.statistic = mean;
    v.target = target;
    v.stderr_or_ci = predicted_stderr;
    v.z_or_chi2 = predicted_stderr > 0.0 ? (mean - target) / predicted_stderr
                                         : (mean == target ? 0.0 : INFINITY);
    v.pass = std::abs(v.z_or_chi2) <= kSigmaThreshold;
    return v;
}

// Variance test with the chi-square interval at 4-sigma-equivalent coverage
// (Wilson-Hilferty z); variance estimators at these n are visibly skewed, so
// a normal interval would be miscalibrated.
inline Verdict test_variance(std::string id, const ReplicaStats& s, double target) {
    if (s.n < 30) throw std::invalid_argument("test_variance: needs n >= 30");
    Verdict v;
    v.test_id = std::move(id);
    v.statistic = s.variance;
    v.target = target;
    const double dof = double(s.n - 1);
    v.z_or_chi2 = variance_z_equivalent(s.variance, target, dof);
    const double p4 = normal_cdf(kSigmaThreshold);
    v.stderr_or_ci = target * (chi_square_quantile(p4, dof) - chi_square_quantile(1.0 - p4, dof)) /
                     (2.0 * dof); // half-width of the acceptance band around the target
    v.pass = std::abs(v.z_or_chi2) <= kSigmaThreshold;
    return v;
}

struct MomentNormality {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double z_skew = 0.0;
    double z_kurt = 0.0;
    bool pass = false;
};

// Moment-based normality check with the asymptotic standard errors
// sqrt(6/n) and sqrt(24/n).
inline MomentNormality normality_check(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 30) throw std::invalid_argument("normality_check: needs n >= 30");
    ExactSum sum;
    for (double v : values) sum.add(v);
    const double mean = sum.value() / double(n);
    ExactSum s2, s3, s4;
    for (double v : values) {
        const double d = v - mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    const double m2 = s2.value() / double(n);
    const double m3 = s3.value() / double(n);
    const double m4 = s4.value() / double(n);
    MomentNormality out;
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    out.z_skew = out.skewness / std::sqrt(6.0 / double(n));
    out.z_kurt = out.excess_kurtosis / std::sqrt(24.0 / double(n));
    out.pass = std::abs(out.z_skew) <= kSigmaThreshold && std::abs(out.z_kurt) <= kSigmaThreshold;
    return out;
}

struct ConvergenceFit {
    std::vector<double> epsilons;
    std::vector<double> values;
    double target = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    std::vector<std::size_t> excluded; // zero-residual points left out of the fit
};

// Least-squares slope of log|value - target| against log eps.
inline ConvergenceFit fit_rate(std::span<const std::pair<double, double>> points, double target) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate: needs >= 3 epsilon levels");
    ConvergenceFit fit;
    fit.target = target;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < points.size(); ++i) {
        fit.epsilons.push_back(points[i].first);
        fit.values.push_back(points[i].second);
        const double res = std::abs(points[i].second - target);
        if (res == 0.0) {
            fit.excluded.push_back(i);
            continue;
        }
        xs.push_back(std::log(points[i].first));
        ys.push_back(std::log(res));
    }
    const std::size_t m = xs.size();
    if (m < 2) {
        fit.slope = 0.0;
        fit.r_squared = 0.0;
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(m);
    my /= double(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

} // namespace hardrods
