#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardrods/measures.hpp"
#include "hardrods/rng.hpp"
#include "hardrods/test_function.hpp"

namespace hardrods {

struct RodPoint {
    double x; // initial position, macroscopic units
    double v; // velocity mark
    double r; // rod-length mark; physical length is epsilon * r
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct SeedInfo {
    std::uint64_t master_seed = 0;
    std::uint64_t replica_index = 0;
};

// A finite marked point configuration on a window, sorted by position, with
// prefix sums of the length marks so interval masses are O(log n) lookups.
// Immutable after construction; all queries are const.
class Configuration {
public:
    static constexpr double kDefaultCountCap = 1e8;

    // Poisson sample with intensity eps^-1 rho dx dmu(v, r) on the window.
    // Fully determined by (seed.master_seed, seed.replica_index).
    static Configuration sample(double epsilon, double rho, const VelocityLengthMeasure& mu,
                                Interval window, SeedInfo seed,
                                double count_cap = kDefaultCountCap) {
        if (!(epsilon > 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("sample: epsilon must be in (0, 1]");
        if (!(rho > 0.0)) throw std::invalid_argument("sample: rho must be positive");
        if (window.hi < window.lo) throw std::invalid_argument("sample: empty window");

        const double expected = rho * window.length() / epsilon;
        if (expected > count_cap)
            throw std::runtime_error("sample: expected point count " + std::to_string(expected) +
                                     " exceeds cap " + std::to_string(count_cap));

        Rng rng = Rng::replica_stream(seed.master_seed, seed.replica_index);
        const std::uint64_t n = rng.poisson(expected);

        std::vector<RodPoint> pts;
        pts.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            RodPoint p;
            p.x = rng.uniform(window.lo, window.hi);
            mu.sample_mark(rng, p.v, p.r);
            pts.push_back(p);
        }
        return Configuration(std::move(pts), epsilon, rho, window, seed);
    }

    // Crafted constructor for tests and oracles; same invariants, explicit points.
    static Configuration from_points(std::vector<RodPoint> pts, double epsilon, double rho,
                                     Interval window) {
        return Configuration(std::move(pts), epsilon, rho, window, SeedInfo{});
    }

    const std::vector<RodPoint>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    double epsilon() const { return epsilon_; }
    double rho() const { return rho_; }
    const Interval& window() const { return window_; }
    const SeedInfo& seed_info() const { return seed_; }
    double max_abs_velocity() const { return max_abs_v_; }

    // Signed rod volume over the half-open interval (a, b]; antisymmetric in
    // (a, b) by construction.
    double mass(double a, double b) const {
        return epsilon_ * (prefix_at(b) - prefix_at(a));
    }

    // Dilation shift of point i: epsilon * (sum of length marks strictly
    // between 0 and x_i in sorted order, the point itself excluded).
    double dilation_shift(std::size_t i) const {
        const double base = prefix_[zero_index_];
        const double s = (i >= zero_index_) ? prefix_[i] : prefix_[i + 1];
        return epsilon_ * (s - base);
    }

    double dilated_position(std::size_t i) const { return pts_[i].x + dilation_shift(i); }

    // Dilated image endpoints of the window.
    double image_lo() const { return window_.lo + mass(0.0, window_.lo); }
    double image_hi() const { return window_.hi + mass(0.0, window_.hi); }

    // Index range [first, last) of points with x in [lo, hi].
    std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const {
        auto cmp = [](const RodPoint& p, double x) { return p.x < x; };
        auto first = std::lower_bound(pts_.begin(), pts_.end(), lo, cmp);
        auto cmp2 = [](double x, const RodPoint& p) { return x < p.x; };
        auto last = std::upper_bound(pts_.begin(), pts_.end(), hi, cmp2);
        return {std::size_t(first - pts_.begin()), std::size_t(last - pts_.begin())};
    }

private:
    Configuration(std::vector<RodPoint> pts, double epsilon, double rho, Interval window,
                  SeedInfo seed)
        : pts_(std::move(pts)), epsilon_(epsilon), rho_(rho), window_(window), seed_(seed) {
        for (const auto& p : pts_) {
            if (!(std::isfinite(p.x) && std::isfinite(p.v) && p.r >= 0.0 && std::isfinite(p.r)))
                throw std::invalid_argument("configuration points must be finite with r >= 0");
            if (!window_.contains(p.x))
                throw std::invalid_argument("configuration point outside window");
        }
        // ties (never under Poisson sampling) keep insertion order
        std::stable_sort(pts_.begin(), pts_.end(),
                         [](const RodPoint& a, const RodPoint& b) { return a.x < b.x; });
        prefix_.resize(pts_.size() + 1);
        prefix_[0] = 0.0;
        max_abs_v_ = 0.0;
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            prefix_[i + 1] = prefix_[i] + pts_[i].r;
            max_abs_v_ = std::max(max_abs_v_, std::abs(pts_[i].v));
        }
        // number of points with x <= 0
        auto cmp2 = [](double x, const RodPoint& p) { return x < p.x; };
        zero_index_ = std::size_t(
            std::upper_bound(pts_.begin(), pts_.end(), 0.0, cmp2) - pts_.begin());
    }

    // Inclusive prefix of length marks over points with x <= u.
    double prefix_at(double u) const {
        auto cmp2 = [](double x, const RodPoint& p) { return x < p.x; };
        std::size_t idx = std::size_t(
            std::upper_bound(pts_.begin(), pts_.end(), u, cmp2) - pts_.begin());
        return prefix_[idx];
    }

    std::vector<RodPoint> pts_;
    std::vector<double> prefix_;
    double epsilon_;
    double rho_;
    Interval window_;
    SeedInfo seed_;
    double max_abs_v_ = 0.0;
    std::size_t zero_index_ = 0;
};

struct DilatedEntry {
    double y;
    double v;
    double r;
    std::size_t source_index;
};

// The rod configuration Y: y = x + m_0^x with the point's own length excluded.
// Order matches the source configuration since the marks are nonnegative.
class DilatedConfiguration {
public:
    explicit DilatedConfiguration(const Configuration& cfg) : epsilon_(cfg.epsilon()) {
        if (!cfg.window().contains(0.0))
            throw std::invalid_argument("dilate: window must contain 0");
        entries_.reserve(cfg.size());
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            const auto& p = cfg.points()[i];
            entries_.push_back(DilatedEntry{cfg.dilated_position(i), p.v, p.r, i});
        }
        image_lo_ = cfg.image_lo();
        image_hi_ = cfg.image_hi();
    }

    const std::vector<DilatedEntry>& entries() const { return entries_; }
    double epsilon() const { return epsilon_; }
    double image_lo() const { return image_lo_; }
    double image_hi() const { return image_hi_; }

private:
    std::vector<DilatedEntry> entries_;
    double epsilon_;
    double image_lo_;
    double image_hi_;
};

inline DilatedConfiguration dilate(const Configuration& cfg) {
    return DilatedConfiguration(cfg);
}

enum class FieldScaling { static_t0, euler, diffusive };

struct FieldSample {
    double raw_sum = 0.0;     // eps * sum r phi(...)
    double asym_center = 0.0; // <phi> / (1 + sigma)
    double epsilon = 1.0;
    FieldScaling scaling = FieldScaling::static_t0;
    double time = 0.0;

    // eps^{-1/2} (raw - center) with the asymptotic centering; the replica
    // pipeline substitutes the empirical mean when so configured.
    double value_asymptotic() const { return (raw_sum - asym_center) / std::sqrt(epsilon); }
};

// Static fluctuation field statistic against phi. phi_mean_value is the
// precomputed <phi>; the spatial support must sit strictly inside the dilated
// image of the window, otherwise the estimate would be silently truncated.
inline FieldSample field_estimate(const DilatedConfiguration& dc, const TestFunction& phi,
                                  const MacroParams& params, VelocityBounds vb,
                                  double phi_mean_value) {
    auto [slo, shi] = phi.spatial_support(vb);
    if (!(dc.image_lo() < slo && shi < dc.image_hi()))
        throw std::runtime_error("field_estimate: test-function support not strictly inside "
                                 "the dilated window image");
    const auto& es = dc.entries();
    auto cmp = [](const DilatedEntry& e, double y) { return e.y < y; };
    std::size_t i0 = std::size_t(std::lower_bound(es.begin(), es.end(), slo, cmp) - es.begin());
    double acc = 0.0;
    for (std::size_t i = i0; i < es.size() && es[i].y <= shi; ++i)
        acc += es[i].r * phi(es[i].y, es[i].v, es[i].r);

    FieldSample s;
    s.raw_sum = dc.epsilon() * acc;
    s.asym_center = phi_mean_value / (1.0 + params.sigma);
    s.epsilon = dc.epsilon();
    s.scaling = FieldScaling::static_t0;
    s.time = 0.0;
    return s;
}

} // namespace hardrods
