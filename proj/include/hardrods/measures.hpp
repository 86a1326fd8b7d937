#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardrods/quadrature.hpp"
#include "hardrods/rng.hpp"
#include "hardrods/special_functions.hpp"

namespace hardrods {

enum class DistKind { atom, uniform, gaussian, exponential };

// One marginal law from the mixture grammar. The restricted grammar keeps all
// first and second moments finite and sampling exact.
struct DistSpec {
    DistKind kind = DistKind::atom;
    double a = 0.0; // atom: value; uniform: lo; gaussian: mean; exponential: rate
    double b = 0.0; // uniform: hi; gaussian: sd

    static DistSpec atom(double value) { return {DistKind::atom, value, 0.0}; }
    static DistSpec uniform(double lo, double hi) { return {DistKind::uniform, lo, hi}; }
    static DistSpec gaussian(double mean, double sd) { return {DistKind::gaussian, mean, sd}; }
    static DistSpec exponential(double rate) { return {DistKind::exponential, rate, 0.0}; }

    void validate() const {
        switch (kind) {
        case DistKind::atom:
            if (!std::isfinite(a)) throw std::invalid_argument("atom value must be finite");
            break;
        case DistKind::uniform:
            if (!(std::isfinite(a) && std::isfinite(b) && a < b))
                throw std::invalid_argument("uniform requires finite lo < hi");
            break;
        case DistKind::gaussian:
            if (!(std::isfinite(a) && b > 0.0))
                throw std::invalid_argument("gaussian requires finite mean and sd > 0");
            break;
        case DistKind::exponential:
            if (!(a > 0.0)) throw std::invalid_argument("exponential requires rate > 0");
            break;
        }
    }

    bool continuous() const { return kind != DistKind::atom; }

    double mean() const {
        switch (kind) {
        case DistKind::atom: return a;
        case DistKind::uniform: return 0.5 * (a + b);
        case DistKind::gaussian: return a;
        case DistKind::exponential: return 1.0 / a;
        }
        return 0.0;
    }

    double second_moment() const {
        switch (kind) {
        case DistKind::atom: return a * a;
        case DistKind::uniform: return (a * a + a * b + b * b) / 3.0;
        case DistKind::gaussian: return a * a + b * b;
        case DistKind::exponential: return 2.0 / (a * a);
        }
        return 0.0;
    }

    double support_lo() const {
        switch (kind) {
        case DistKind::atom: return a;
        case DistKind::uniform: return a;
        case DistKind::gaussian: return -std::numeric_limits<double>::infinity();
        case DistKind::exponential: return 0.0;
        }
        return 0.0;
    }

    double support_hi() const {
        switch (kind) {
        case DistKind::atom: return a;
        case DistKind::uniform: return b;
        case DistKind::gaussian: return std::numeric_limits<double>::infinity();
        case DistKind::exponential: return std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    bool nonnegative_support() const { return support_lo() >= 0.0; }

    // Bound B with P(|X| > B) <= tail; exact for bounded laws.
    double abs_bound(double tail) const {
        switch (kind) {
        case DistKind::atom: return std::abs(a);
        case DistKind::uniform: return std::max(std::abs(a), std::abs(b));
        case DistKind::gaussian: return std::abs(a) + b * normal_quantile(1.0 - tail / 2.0);
        case DistKind::exponential: return -std::log(tail) / a;
        }
        return 0.0;
    }

    double sample(Rng& rng) const {
        switch (kind) {
        case DistKind::atom: return a;
        case DistKind::uniform: return rng.uniform(a, b);
        case DistKind::gaussian: return rng.normal(a, b);
        case DistKind::exponential: return rng.exponential(a);
        }
        return 0.0;
    }

    // Nodes/weights so that E[f(X)] = sum w_i f(x_i); 64 nodes per continuous
    // law, exact atom otherwise.
    void quad_points(std::vector<double>& xs, std::vector<double>& ws) const {
        xs.clear();
        ws.clear();
        switch (kind) {
        case DistKind::atom:
            xs.push_back(a);
            ws.push_back(1.0);
            break;
        case DistKind::uniform: {
            const QuadRule& r = gauss_legendre_64();
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                xs.push_back(mid + half * r.nodes[i]);
                ws.push_back(0.5 * r.weights[i]);
            }
            break;
        }
        case DistKind::gaussian: {
            const QuadRule& r = gauss_hermite_64();
            const double inv_sqrt_pi = 0.5641895835477562869;
            const double scale = b * M_SQRT2;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                xs.push_back(a + scale * r.nodes[i]);
                ws.push_back(r.weights[i] * inv_sqrt_pi);
            }
            break;
        }
        case DistKind::exponential: {
            const QuadRule& r = gauss_laguerre_64();
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                xs.push_back(r.nodes[i] / a);
                ws.push_back(r.weights[i]);
            }
            break;
        }
        }
    }

    // E|X - v| in closed form; the |.| kink is handled per law instead of
    // pushing it through a Gauss rule.
    double mean_abs_dev(double v) const {
        switch (kind) {
        case DistKind::atom:
            return std::abs(v - a);
        case DistKind::uniform: {
            if (v <= a) return mean() - v;
            if (v >= b) return v - mean();
            return ((v - a) * (v - a) + (b - v) * (b - v)) / (2.0 * (b - a));
        }
        case DistKind::gaussian: {
            double z = (v - a) / b;
            return b * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z));
        }
        case DistKind::exponential: {
            if (v <= 0.0) return 1.0 / a - v;
            return v - 1.0 / a + 2.0 * std::exp(-a * v) / a;
        }
        }
        return 0.0;
    }
};

struct MeasureComponent {
    double weight = 1.0;
    DistSpec velocity;
    DistSpec length;
};

// The mark measure: a finite mixture of product laws for (velocity, length).
class VelocityLengthMeasure {
public:
    explicit VelocityLengthMeasure(std::vector<MeasureComponent> components)
        : comps_(std::move(components)) {
        if (comps_.empty())
            throw std::invalid_argument("measure needs at least one component");
        double wsum = 0.0;
        for (const auto& c : comps_) {
            if (!(c.weight >= 0.0))
                throw std::invalid_argument("component weights must be nonnegative");
            c.velocity.validate();
            c.length.validate();
            if (!c.length.nonnegative_support())
                throw std::invalid_argument("length laws must be supported on [0, inf)");
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw std::invalid_argument("component weights must sum to 1 (+-1e-12), got " +
                                        std::to_string(wsum));
        cum_.reserve(comps_.size());
        double acc = 0.0;
        for (const auto& c : comps_) {
            acc += c.weight;
            cum_.push_back(acc);
        }
        cum_.back() = 1.0;
    }

    const std::vector<MeasureComponent>& components() const { return comps_; }

    // Integral of f(v, r) against the measure: exact atom summation, tensor
    // Gauss rules for continuous factors. For integrands with a |.| kink in v
    // use the dedicated routines below instead.
    template <class F>
    double moment(F&& f) const {
        double total = 0.0;
        std::vector<double> vx, vw, rx, rw;
        for (const auto& c : comps_) {
            c.velocity.quad_points(vx, vw);
            c.length.quad_points(rx, rw);
            double acc = 0.0;
            for (std::size_t i = 0; i < vx.size(); ++i) {
                double inner = 0.0;
                for (std::size_t j = 0; j < rx.size(); ++j)
                    inner += rw[j] * f(vx[i], rx[j]);
                acc += vw[i] * inner;
            }
            total += c.weight * acc;
        }
        if (!std::isfinite(total))
            throw std::runtime_error("moment: integrand produced a non-finite value on the "
                                     "support of the measure");
        return total;
    }

    double mean_r() const { return weighted([](const MeasureComponent& c) { return c.length.mean(); }); }
    double mean_rv() const {
        return weighted([](const MeasureComponent& c) { return c.length.mean() * c.velocity.mean(); });
    }
    double mean_r2() const {
        return weighted([](const MeasureComponent& c) { return c.length.second_moment(); });
    }

    // E[r^2 |v - w|] using per-component closed forms for the velocity kink.
    double r2_abs_vel_dev(double v) const {
        return weighted([v](const MeasureComponent& c) {
            return c.length.second_moment() * c.velocity.mean_abs_dev(v);
        });
    }

    bool velocities_all_atoms() const {
        for (const auto& c : comps_)
            if (c.velocity.kind != DistKind::atom) return false;
        return true;
    }

    std::vector<double> velocity_atoms() const {
        std::vector<double> out;
        for (const auto& c : comps_)
            if (c.velocity.kind == DistKind::atom) out.push_back(c.velocity.a);
        return out;
    }

    // Velocity magnitude bound used by the buffer policy; exact for bounded
    // laws, a 1 - tail quantile cutoff otherwise.
    double velocity_bound(double tail = 1e-12) const {
        double bound = 0.0;
        for (const auto& c : comps_)
            bound = std::max(bound, c.velocity.abs_bound(tail));
        return bound;
    }

    double length_bound(double tail = 1e-12) const {
        double bound = 0.0;
        for (const auto& c : comps_)
            bound = std::max(bound, c.length.abs_bound(tail));
        return bound;
    }

    void sample_mark(Rng& rng, double& v, double& r) const {
        double u = rng.uniform01();
        std::size_t k = 0;
        while (k + 1 < cum_.size() && u >= cum_[k]) ++k;
        v = comps_[k].velocity.sample(rng);
        r = comps_[k].length.sample(rng);
    }

private:
    template <class F>
    double weighted(F&& f) const {
        double total = 0.0;
        for (const auto& c : comps_) total += c.weight * f(c);
        return total;
    }

    std::vector<MeasureComponent> comps_;
    std::vector<double> cum_;
};

// Macroscopic constants of the gas at number-density rho.
struct MacroParams {
    double rho = 1.0;
    double sigma = 0.0;   // volume density
    double pi = 0.0;      // momentum density
    double rho_bar = 1.0; // rod density rho / (1 + sigma)
};

inline MacroParams macro_params(double rho, const VelocityLengthMeasure& mu) {
    if (!(rho > 0.0)) throw std::invalid_argument("macro_params: rho must be positive");
    MacroParams p;
    p.rho = rho;
    p.sigma = rho * mu.moment([](double, double r) { return r; });
    p.pi = rho * mu.moment([](double v, double r) { return r * v; });
    p.rho_bar = rho / (1.0 + p.sigma);
    return p;
}

inline double effective_velocity(double v, const MacroParams& p) {
    return v * (1.0 + p.sigma) - p.pi;
}

// Integral form v + rho * iint r (v - w) dmu(w, r); the closed form above must
// agree with this within 1e-10 (cross-checked by the oracle suite).
inline double effective_velocity_integral(double v, double rho, const VelocityLengthMeasure& mu) {
    return v + rho * mu.moment([v](double w, double r) { return r * (v - w); });
}

// Diffusivity of the rigid Brownian translation: rho * iint r^2 |v - w| dmu.
inline double diffusivity(double v, double rho, const VelocityLengthMeasure& mu) {
    return rho * mu.r2_abs_vel_dev(v);
}

} // namespace hardrods
