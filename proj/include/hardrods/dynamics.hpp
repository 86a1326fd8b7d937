#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardrods/ensemble.hpp"
#include "hardrods/exact_sum.hpp"
#include "hardrods/measures.hpp"

namespace hardrods {

struct FluxQuery {
    double x;
    double v;
    double t; // >= 0; macroscopic for Euler runs, eps^-1 * t_macro for diffusive runs
};

struct TrajectoryRecord {
    std::size_t source_index;
    double y0;           // dilated initial position
    double yt;           // position at time t
    double displacement; // yt - y0 = v t + flux
    double recentered;   // displacement - v_eff(v) t
    double flux;         // crossing flux, exact
    double free_shift;   // v t
};

namespace detail {

// Canonical crossing predicate shared by both flux kernels. A point (x',v',r')
// crosses the query trajectory iff it starts strictly on one side and its free
// endpoint x' + v' t lands strictly on the other side of x + v t; this is the
// strict-inequality indicator pair written as an inversion between the
// initial and final orders. Final positions are compared as the rounded
// doubles x + v * t so both kernels classify identical sets.
inline int crossing_sign(double px, double pb, double qx, double qb) {
    if (px > qx && pb < qb) return +1;
    if (px < qx && pb > qb) return -1;
    return 0;
}

inline void check_time(double t) {
    if (std::isnan(t) || t < 0.0)
        throw std::invalid_argument("flux: negative time is not supported");
}

inline void check_buffer(const Configuration& cfg, const FluxQuery& q, std::size_t which) {
    const double vmax = cfg.max_abs_velocity() + std::abs(q.v);
    const double reach = vmax * q.t;
    if (q.x - reach < cfg.window().lo || q.x + reach > cfg.window().hi)
        throw std::runtime_error(
            "flux: query " + std::to_string(which) +
            " violates the window buffer (needs [" + std::to_string(q.x - reach) + ", " +
            std::to_string(q.x + reach) + "] inside [" + std::to_string(cfg.window().lo) +
            ", " + std::to_string(cfg.window().hi) + "])");
}

// Fenwick tree whose nodes hold exact expansions; prefix sums are exact in
// the represented value regardless of insertion order.
class FenwickExact {
public:
    explicit FenwickExact(std::size_t n) : t_(n) {}

    void add(std::size_t i, double w) {
        for (; i < t_.size(); i |= i + 1) t_[i].add(w);
    }

    // Accumulate the first `count` slots into acc (negated if subtract).
    void prefix_into(std::size_t count, ExactSum& acc, bool subtract) const {
        for (std::size_t i = count; i > 0; i &= i - 1) {
            if (subtract)
                acc.add_negated(t_[i - 1]);
            else
                acc.add(t_[i - 1]);
        }
    }

private:
    std::vector<ExactSum> t_;
};

} // namespace detail

// Reference flux oracle: direct enumeration of the crossing indicators over
// every point. Exact accumulation, so the value depends only on which points
// cross, not on enumeration order.
inline double flux_naive(const Configuration& cfg, const FluxQuery& q) {
    detail::check_time(q.t);
    detail::check_buffer(cfg, q, 0);
    const double qb = q.x + q.v * q.t;
    ExactSum acc;
    for (const auto& p : cfg.points()) {
        const double pb = p.x + p.v * q.t;
        const int s = detail::crossing_sign(p.x, pb, q.x, qb);
        if (s > 0)
            acc.add(p.r);
        else if (s < 0)
            acc.add(-p.r);
    }
    return cfg.epsilon() * acc.value();
}

// Batch flux kernel: all queries share one horizon t. Rank-space sweep with a
// Fenwick tree over final-position ranks, O((N+M) log(N+M)). Elementwise equal
// to flux_naive bit for bit: both kernels classify points with the same
// predicate and reduce through exact accumulators.
inline std::vector<double> flux_batch(const Configuration& cfg,
                                      std::span<const FluxQuery> queries) {
    const std::size_t m = queries.size();
    if (m == 0) return {};
    const double t = queries[0].t;
    detail::check_time(t);
    for (std::size_t j = 0; j < m; ++j) {
        if (queries[j].t != t)
            throw std::invalid_argument("flux_batch: queries must share one horizon");
        detail::check_buffer(cfg, queries[j], j);
    }

    const auto& pts = cfg.points();
    const std::size_t n = pts.size();
    std::vector<ExactSum> acc(m);

    // final free positions
    std::vector<double> pb(n);
    for (std::size_t i = 0; i < n; ++i) pb[i] = pts[i].x + pts[i].v * t;
    std::vector<double> qb(m);
    for (std::size_t j = 0; j < m; ++j) qb[j] = queries[j].x + queries[j].v * t;

    // distinct final-position slots
    std::vector<double> slots(pb);
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    const std::size_t u = slots.size();
    auto slot_of = [&](double b) {
        return std::size_t(std::lower_bound(slots.begin(), slots.end(), b) - slots.begin());
    };

    // queries by initial position (points are already sorted)
    std::vector<std::size_t> qorder(m);
    for (std::size_t j = 0; j < m; ++j) qorder[j] = j;
    std::sort(qorder.begin(), qorder.end(), [&](std::size_t a, std::size_t b) {
        if (queries[a].x != queries[b].x) return queries[a].x < queries[b].x;
        return a < b;
    });

    // Pass 1, descending initial position: positive part, points with
    // x' > x_q and b' < b_q. Queries at a given x are answered before points
    // at the same x are inserted, so the strict inequality holds for ties.
    {
        detail::FenwickExact fw(u);
        std::size_t ip = n;
        for (std::size_t k = m; k-- > 0;) {
            const std::size_t j = qorder[k];
            while (ip > 0 && pts[ip - 1].x > queries[j].x) {
                --ip;
                fw.add(slot_of(pb[ip]), pts[ip].r);
            }
            const std::size_t below =
                std::size_t(std::lower_bound(slots.begin(), slots.end(), qb[j]) - slots.begin());
            fw.prefix_into(below, acc[j], /*subtract=*/false);
        }
    }

    // Pass 2, ascending initial position: negative part, points with
    // x' < x_q and b' > b_q, via reversed slots so a suffix is a prefix.
    {
        detail::FenwickExact fw(u);
        std::size_t ip = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t j = qorder[k];
            while (ip < n && pts[ip].x < queries[j].x) {
                fw.add(u - 1 - slot_of(pb[ip]), pts[ip].r);
                ++ip;
            }
            const std::size_t first_gt =
                std::size_t(std::upper_bound(slots.begin(), slots.end(), qb[j]) - slots.begin());
            fw.prefix_into(u - first_gt, acc[j], /*subtract=*/true);
        }
    }

    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = cfg.epsilon() * acc[j].value();
    return out;
}

// Tagged-rod evolution per the exchange dynamics: yt = y0 + v t + flux, with
// the recentering against the effective velocity. Small batches fall back to
// the naive kernel; the two kernels agree bitwise so the dispatch is
// semantically invisible.
inline std::vector<TrajectoryRecord> evolve_tagged(const Configuration& cfg,
                                                   std::span<const std::size_t> tagged, double t,
                                                   const MacroParams& params) {
    detail::check_time(t);
    std::vector<FluxQuery> queries;
    queries.reserve(tagged.size());
    for (std::size_t idx : tagged) {
        if (idx >= cfg.size())
            throw std::out_of_range("evolve_tagged: tagged index out of range");
        queries.push_back(FluxQuery{cfg.points()[idx].x, cfg.points()[idx].v, t});
    }
    for (std::size_t j = 0; j < queries.size(); ++j) {
        try {
            detail::check_buffer(cfg, queries[j], j);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("evolve_tagged: tagged index " + std::to_string(tagged[j]) +
                                     " violates the window buffer at horizon " + std::to_string(t));
        }
    }

    std::vector<double> flux(queries.size());
    if (queries.size() <= 16) {
        for (std::size_t j = 0; j < queries.size(); ++j) flux[j] = flux_naive(cfg, queries[j]);
    } else {
        flux = flux_batch(cfg, queries);
    }

    std::vector<TrajectoryRecord> out;
    out.reserve(tagged.size());
    for (std::size_t j = 0; j < tagged.size(); ++j) {
        const std::size_t idx = tagged[j];
        const auto& p = cfg.points()[idx];
        TrajectoryRecord rec;
        rec.source_index = idx;
        rec.y0 = cfg.dilated_position(idx);
        rec.flux = flux[j];
        rec.free_shift = p.v * t;
        rec.displacement = rec.free_shift + rec.flux;
        rec.yt = rec.y0 + rec.displacement;
        rec.recentered = rec.displacement - effective_velocity(p.v, params) * t;
        out.push_back(rec);
    }
    return out;
}

// Exact Poisson variance of the flux at a fixed position and horizon t_micro:
//   eps * rho * t_micro * iint r^2 |v - w| dmu(w, r)
// evaluated by kink-split composite quadrature; an independent numerical route
// from diffusivity(), which uses per-law closed forms.
inline double flux_variance_exact(double rho, const VelocityLengthMeasure& mu, double v,
                                  double t_micro, double epsilon) {
    if (t_micro < 0.0) throw std::invalid_argument("flux_variance_exact: t_micro must be >= 0");
    double integral = 0.0;
    const QuadRule& gl = gauss_legendre_64();
    std::vector<double> rx, rw;
    for (const auto& c : mu.components()) {
        // E[r^2] with the length law's own rule
        c.length.quad_points(rx, rw);
        double r2 = 0.0;
        for (std::size_t j = 0; j < rx.size(); ++j) r2 += rw[j] * rx[j] * rx[j];

        // E|v - w| by composite Gauss-Legendre with the domain split at w = v
        double dev = 0.0;
        switch (c.velocity.kind) {
        case DistKind::atom:
            dev = std::abs(v - c.velocity.a);
            break;
        case DistKind::uniform: {
            auto f = [&](double w) { return std::abs(v - w) / (c.velocity.b - c.velocity.a); };
            double cut = std::clamp(v, c.velocity.a, c.velocity.b);
            dev = integrate_panels(f, c.velocity.a, cut, 4, gl) +
                  integrate_panels(f, cut, c.velocity.b, 4, gl);
            break;
        }
        case DistKind::gaussian: {
            const double mlo = c.velocity.a - 14.0 * c.velocity.b;
            const double mhi = c.velocity.a + 14.0 * c.velocity.b;
            auto f = [&](double w) {
                double z = (w - c.velocity.a) / c.velocity.b;
                return std::abs(v - w) * normal_pdf(z) / c.velocity.b;
            };
            double cut = std::clamp(v, mlo, mhi);
            dev = integrate_panels(f, mlo, cut, 8, gl) + integrate_panels(f, cut, mhi, 8, gl);
            break;
        }
        case DistKind::exponential: {
            const double rate = c.velocity.a;
            const double whi = 50.0 / rate;
            auto f = [&](double w) { return std::abs(v - w) * rate * std::exp(-rate * w); };
            double cut = std::clamp(v, 0.0, whi);
            dev = integrate_panels(f, 0.0, cut, 8, gl) + integrate_panels(f, cut, whi, 12, gl);
            break;
        }
        }
        integral += c.weight * r2 * dev;
    }
    return epsilon * rho * t_micro * integral;
}

} // namespace hardrods
