#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardrods/dynamics.hpp"
#include "hardrods/ensemble.hpp"
#include "hardrods/test_function.hpp"

namespace hardrods {

namespace detail {

// Finite-volume guard: rods keep their spatial order under the exchange
// dynamics, so if the outermost evolved rods land outside the support with
// this margin, rods beyond the evolved range cannot have reached it.
constexpr double kEdgeGuard = 0.5;

inline std::vector<std::size_t> core_indices(const Configuration& cfg, double core_half) {
    auto [i0, i1] = cfg.index_range(-core_half, core_half);
    std::vector<std::size_t> idx;
    idx.reserve(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) idx.push_back(i);
    return idx;
}

inline void check_edges(double left_landing, double right_landing, double slo, double shi,
                        const char* what) {
    if (!(left_landing < slo - kEdgeGuard && right_landing > shi + kEdgeGuard))
        throw std::runtime_error(std::string(what) +
                                 ": evolved core does not bracket the test-function support; "
                                 "enlarge the core window");
}

} // namespace detail

// Fluctuation field in the Euler scaling: evolve every rod of the core window
// to time t and test against phi, centered at <phi>/(1+sigma).
inline FieldSample euler_field(const Configuration& cfg, const TestFunction& phi, double t,
                               const MacroParams& params, VelocityBounds vb, double core_half,
                               double phi_mean_value) {
    auto idx = detail::core_indices(cfg, core_half);
    if (idx.empty())
        throw std::runtime_error("euler_field: no rods in the core window");
    auto recs = evolve_tagged(cfg, idx, t, params);

    auto [slo, shi] = phi.spatial_support(vb);
    detail::check_edges(recs.front().yt, recs.back().yt, slo, shi, "euler_field");

    double acc = 0.0;
    for (const auto& rec : recs) {
        const auto& p = cfg.points()[rec.source_index];
        if (rec.yt >= slo && rec.yt <= shi) acc += p.r * phi(rec.yt, p.v, p.r);
    }

    FieldSample s;
    s.raw_sum = cfg.epsilon() * acc;
    s.asym_center = phi_mean_value / (1.0 + params.sigma);
    s.epsilon = cfg.epsilon();
    s.scaling = FieldScaling::euler;
    s.time = t;
    return s;
}

// Diffusive-scale field: micro horizon t/eps, each rod recentered by its own
// effective velocity before testing against phi.
inline FieldSample diffusive_field(const Configuration& cfg, const TestFunction& phi,
                                   double t_macro, const MacroParams& params, VelocityBounds vb,
                                   double core_half, double phi_mean_value) {
    const double t_micro = t_macro / cfg.epsilon();
    auto idx = detail::core_indices(cfg, core_half);
    if (idx.empty())
        throw std::runtime_error("diffusive_field: no rods in the core window");
    auto recs = evolve_tagged(cfg, idx, t_micro, params);

    auto [slo, shi] = phi.spatial_support(vb);
    double arg_left = recs.front().y0 + recs.front().recentered;
    double arg_right = recs.back().y0 + recs.back().recentered;
    detail::check_edges(arg_left, arg_right, slo, shi, "diffusive_field");

    double acc = 0.0;
    for (const auto& rec : recs) {
        const auto& p = cfg.points()[rec.source_index];
        const double arg = rec.y0 + rec.recentered;
        if (arg >= slo && arg <= shi) acc += p.r * phi(arg, p.v, p.r);
    }

    FieldSample s;
    s.raw_sum = cfg.epsilon() * acc;
    s.asym_center = phi_mean_value / (1.0 + params.sigma);
    s.epsilon = cfg.epsilon();
    s.scaling = FieldScaling::diffusive;
    s.time = t_macro;
    return s;
}

struct RigidStats {
    std::size_t replicas = 0;
    double variance = 0.0;                       // recentered displacement of the first tagged rod
    std::optional<double> pair_correlation = {}; // empty in the degenerate t = 0 case
    double mean_displacement = 0.0;
};

// Nearest rod to target_x with velocity within `band` of v_tag (band 0
// matches atoms exactly), restricted to the core window.
inline std::size_t select_tagged(const Configuration& cfg, double target_x, double v_tag,
                                 double band, double core_half) {
    auto [i0, i1] = cfg.index_range(-core_half, core_half);
    const auto& pts = cfg.points();
    std::size_t best = i1;
    for (std::size_t i = i0; i < i1; ++i)
        if (std::abs(pts[i].v - v_tag) <= band &&
            (best == i1 || std::abs(pts[i].x - target_x) < std::abs(pts[best].x - target_x)))
            best = i;
    if (best == i1)
        throw std::runtime_error("select_tagged: no rod with velocity near " +
                                 std::to_string(v_tag) + " in the core window");
    return best;
}

// Select the pair of tagged rods for the rigidity experiment: velocities
// within `band` of v_tag (band 0 matches atoms exactly), first rod nearest
// -separation/2, second nearest the first rod plus the separation, at least
// separation/2 away.
inline std::pair<std::size_t, std::size_t> select_tagged_pair(const Configuration& cfg,
                                                              double v_tag, double band,
                                                              double separation,
                                                              double core_half) {
    auto [i0, i1] = cfg.index_range(-core_half, core_half);
    const auto& pts = cfg.points();
    auto eligible = [&](std::size_t i) { return std::abs(pts[i].v - v_tag) <= band; };

    const double target1 = -0.5 * separation;
    std::size_t best1 = i1;
    for (std::size_t i = i0; i < i1; ++i)
        if (eligible(i) && (best1 == i1 ||
                            std::abs(pts[i].x - target1) < std::abs(pts[best1].x - target1)))
            best1 = i;
    if (best1 == i1)
        throw std::runtime_error("rigid_translation_stats: no eligible tagged rod near " +
                                 std::to_string(target1));

    const double target2 = pts[best1].x + separation;
    const double min_x = pts[best1].x + 0.5 * separation;
    std::size_t best2 = i1;
    for (std::size_t i = i0; i < i1; ++i) {
        if (i == best1 || !eligible(i) || pts[i].x < min_x) continue;
        if (best2 == i1 || std::abs(pts[i].x - target2) < std::abs(pts[best2].x - target2))
            best2 = i;
    }
    if (best2 == i1)
        throw std::runtime_error("rigid_translation_stats: fewer than 2 eligible tagged rods");
    return {best1, best2};
}

// Variance of the recentered tagged displacement at micro horizon t/eps and
// the cross-replica correlation between the two separated tagged rods.
// Configurations are supplied one replica at a time by the provider.
template <class ConfigProvider>
RigidStats rigid_translation_stats(ConfigProvider&& provider, std::size_t n_replicas,
                                   double v_tag, double band, double separation, double t_macro,
                                   const MacroParams& params, double core_half) {
    if (n_replicas < 2)
        throw std::invalid_argument("rigid_translation_stats: need at least 2 replicas");
    std::vector<double> d1(n_replicas), d2(n_replicas);
    for (std::size_t k = 0; k < n_replicas; ++k) {
        Configuration cfg = provider(k);
        const double t_micro = t_macro / cfg.epsilon();
        auto [a, b] = select_tagged_pair(cfg, v_tag, band, separation, core_half);
        const std::size_t tagged[2] = {a, b};
        auto recs = evolve_tagged(cfg, std::span<const std::size_t>(tagged, 2), t_micro, params);
        d1[k] = recs[0].recentered;
        d2[k] = recs[1].recentered;
    }

    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n_replicas; ++k) {
        m1 += d1[k];
        m2 += d2[k];
    }
    m1 /= double(n_replicas);
    m2 /= double(n_replicas);
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (std::size_t k = 0; k < n_replicas; ++k) {
        s11 += (d1[k] - m1) * (d1[k] - m1);
        s22 += (d2[k] - m2) * (d2[k] - m2);
        s12 += (d1[k] - m1) * (d2[k] - m2);
    }
    RigidStats out;
    out.replicas = n_replicas;
    out.variance = s11 / double(n_replicas - 1);
    out.mean_displacement = m1;
    if (s11 > 0.0 && s22 > 0.0) out.pair_correlation = s12 / std::sqrt(s11 * s22);
    return out;
}

} // namespace hardrods
