#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardrods/measures.hpp"
#include "hardrods/test_function.hpp"

namespace hardrods {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CenterMode { empirical, asymptotic };

struct TestFunctionSpec {
    SpatialFactor spatial;
    std::vector<double> velocity_poly{1.0};
    std::vector<double> length_poly{1.0};

    TestFunction build() const {
        return TestFunction(spatial, Poly(velocity_poly), Poly(length_poly));
    }
};

struct ExperimentConfig {
    VelocityLengthMeasure measure{{MeasureComponent{1.0, DistSpec::atom(0.0), DistSpec::atom(1.0)}}};
    double rho = 1.0;
    std::vector<double> epsilons{0.1, 0.01, 0.001}; // strictly decreasing
    double window_half_width = 10.0;
    std::vector<double> euler_times{0.25, 0.5, 1.0};
    std::vector<double> diffusive_times{0.25, 0.5, 1.0};
    std::vector<TestFunctionSpec> test_functions;
    std::size_t replicas = 10000;
    std::uint64_t master_seed = 20240817;
    std::string out_dir = "out";
    double velocity_band = 0.05;
    double pair_separation = 2.0;
    double count_cap = 1e8;
    CenterMode center = CenterMode::empirical;
    int threads = 0; // 0 = hardware concurrency
    bool dump_first_config = false;

    json resolved; // the fully resolved config echoed into every artifact
};

namespace detail {

inline void require_keys(const json& j, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* k : required)
        if (!j.contains(k)) throw ConfigError(where + ": missing required key '" + k + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required)
            if (it.key() == k) known = true;
        for (const char* k : optional)
            if (it.key() == k) known = true;
        if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double number(const json& j, const char* key, const std::string& where) {
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline DistSpec parse_dist(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError(where + ": distribution needs a 'type'");
    const std::string type = j.at("type").get<std::string>();
    DistSpec d;
    if (type == "atom") {
        require_keys(j, {"type", "value"}, {}, where);
        d = DistSpec::atom(number(j, "value", where));
    } else if (type == "uniform") {
        require_keys(j, {"type", "lo", "hi"}, {}, where);
        d = DistSpec::uniform(number(j, "lo", where), number(j, "hi", where));
    } else if (type == "gaussian") {
        require_keys(j, {"type", "mean", "sd"}, {}, where);
        d = DistSpec::gaussian(number(j, "mean", where), number(j, "sd", where));
    } else if (type == "exponential") {
        require_keys(j, {"type", "rate"}, {}, where);
        d = DistSpec::exponential(number(j, "rate", where));
    } else {
        throw ConfigError(where + ": unknown distribution type '" + type + "'");
    }
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return d;
}

inline json dist_to_json(const DistSpec& d) {
    switch (d.kind) {
    case DistKind::atom: return json{{"type", "atom"}, {"value", d.a}};
    case DistKind::uniform: return json{{"type", "uniform"}, {"lo", d.a}, {"hi", d.b}};
    case DistKind::gaussian: return json{{"type", "gaussian"}, {"mean", d.a}, {"sd", d.b}};
    case DistKind::exponential: return json{{"type", "exponential"}, {"rate", d.a}};
    }
    return {};
}

inline SpatialFactor parse_spatial(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError(where + ": spatial factor needs a 'type'");
    const std::string type = j.at("type").get<std::string>();
    SpatialFactor f;
    if (type == "gaussian_bump") {
        require_keys(j, {"type", "center", "width"}, {}, where);
        f.kind = SpatialKind::gaussian_bump;
    } else if (type == "cosine_packet") {
        require_keys(j, {"type", "center", "width", "wavenumber"}, {}, where);
        f.kind = SpatialKind::cosine_packet;
        f.wavenumber = number(j, "wavenumber", where);
    } else if (type == "poly_bump") {
        require_keys(j, {"type", "center", "width"}, {}, where);
        f.kind = SpatialKind::poly_bump;
    } else {
        throw ConfigError(where + ": unknown spatial type '" + type + "'");
    }
    f.center = number(j, "center", where);
    f.width = number(j, "width", where);
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return f;
}

inline json spatial_to_json(const SpatialFactor& f) {
    switch (f.kind) {
    case SpatialKind::gaussian_bump:
        return json{{"type", "gaussian_bump"}, {"center", f.center}, {"width", f.width}};
    case SpatialKind::cosine_packet:
        return json{{"type", "cosine_packet"}, {"center", f.center}, {"width", f.width},
                    {"wavenumber", f.wavenumber}};
    case SpatialKind::poly_bump:
        return json{{"type", "poly_bump"}, {"center", f.center}, {"width", f.width}};
    }
    return {};
}

} // namespace detail

inline json config_to_json(const ExperimentConfig& cfg) {
    json j;
    json comps = json::array();
    for (const auto& c : cfg.measure.components())
        comps.push_back(json{{"weight", c.weight},
                             {"velocity", detail::dist_to_json(c.velocity)},
                             {"length", detail::dist_to_json(c.length)}});
    j["measure"] = json{{"components", comps}};
    j["rho"] = cfg.rho;
    j["epsilons"] = cfg.epsilons;
    j["window_half_width"] = cfg.window_half_width;
    j["euler_times"] = cfg.euler_times;
    j["diffusive_times"] = cfg.diffusive_times;
    json tfs = json::array();
    for (const auto& tf : cfg.test_functions)
        tfs.push_back(json{{"spatial", detail::spatial_to_json(tf.spatial)},
                           {"velocity_poly", tf.velocity_poly},
                           {"length_poly", tf.length_poly}});
    j["test_functions"] = tfs;
    j["replicas"] = cfg.replicas;
    j["master_seed"] = cfg.master_seed;
    j["velocity_band"] = cfg.velocity_band;
    j["pair_separation"] = cfg.pair_separation;
    j["count_cap"] = cfg.count_cap;
    j["center"] = cfg.center == CenterMode::empirical ? "empirical" : "asymptotic";
    // out_dir and threads are invocation knobs, not part of the experiment:
    // artifacts must be byte-identical across output locations and thread counts.
    return j;
}

// Parse and schema-validate an experiment config. Every violation is a
// ConfigError (usage error, exit code 2 at the CLI).
inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    detail::require_keys(
        j,
        {"measure", "rho", "epsilons", "window_half_width", "euler_times", "diffusive_times",
         "test_functions", "replicas", "master_seed"},
        {"out_dir", "velocity_band", "pair_separation", "count_cap", "center", "threads"},
        "config");

    ExperimentConfig cfg;

    const json& jm = j.at("measure");
    detail::require_keys(jm, {"components"}, {}, "config.measure");
    std::vector<MeasureComponent> comps;
    for (const auto& jc : jm.at("components")) {
        detail::require_keys(jc, {"weight", "velocity", "length"}, {}, "config.measure.component");
        MeasureComponent c;
        c.weight = detail::number(jc, "weight", "config.measure.component");
        c.velocity = detail::parse_dist(jc.at("velocity"), "config.measure.component.velocity");
        c.length = detail::parse_dist(jc.at("length"), "config.measure.component.length");
        comps.push_back(c);
    }
    try {
        cfg.measure = VelocityLengthMeasure(std::move(comps));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config.measure: ") + e.what());
    }

    cfg.rho = detail::number(j, "rho", "config");
    if (!(cfg.rho > 0.0)) throw ConfigError("config: rho must be positive");

    cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (cfg.epsilons.empty()) throw ConfigError("config: epsilons must be nonempty");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0 && cfg.epsilons[i] <= 1.0))
            throw ConfigError("config: epsilons must lie in (0, 1]");
        if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
            throw ConfigError("config: epsilons must be strictly decreasing");
    }

    cfg.window_half_width = detail::number(j, "window_half_width", "config");
    if (!(cfg.window_half_width > 0.0))
        throw ConfigError("config: window_half_width must be positive");

    cfg.euler_times = j.at("euler_times").get<std::vector<double>>();
    cfg.diffusive_times = j.at("diffusive_times").get<std::vector<double>>();
    for (double t : cfg.euler_times)
        if (!(t >= 0.0)) throw ConfigError("config: euler_times must be >= 0");
    for (double t : cfg.diffusive_times)
        if (!(t >= 0.0)) throw ConfigError("config: diffusive_times must be >= 0");

    for (const auto& jt : j.at("test_functions")) {
        detail::require_keys(jt, {"spatial"}, {"velocity_poly", "length_poly"},
                             "config.test_function");
        TestFunctionSpec tf;
        tf.spatial = detail::parse_spatial(jt.at("spatial"), "config.test_function.spatial");
        if (jt.contains("velocity_poly"))
            tf.velocity_poly = jt.at("velocity_poly").get<std::vector<double>>();
        if (jt.contains("length_poly"))
            tf.length_poly = jt.at("length_poly").get<std::vector<double>>();
        if (tf.velocity_poly.empty() || tf.length_poly.empty())
            throw ConfigError("config.test_function: polynomial factors must be nonempty");
        cfg.test_functions.push_back(tf);
    }
    if (cfg.test_functions.empty())
        throw ConfigError("config: test_functions must be nonempty");

    if (!j.at("replicas").is_number_unsigned() || j.at("replicas").get<std::uint64_t>() < 2)
        throw ConfigError("config: replicas must be an integer >= 2");
    cfg.replicas = j.at("replicas").get<std::size_t>();

    if (!j.at("master_seed").is_number_unsigned())
        throw ConfigError("config: master_seed must be an unsigned integer");
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();

    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("velocity_band")) {
        cfg.velocity_band = detail::number(j, "velocity_band", "config");
        if (!(cfg.velocity_band >= 0.0)) throw ConfigError("config: velocity_band must be >= 0");
    }
    if (j.contains("pair_separation")) {
        cfg.pair_separation = detail::number(j, "pair_separation", "config");
        if (!(cfg.pair_separation > 0.0))
            throw ConfigError("config: pair_separation must be positive");
    }
    if (j.contains("count_cap")) {
        cfg.count_cap = detail::number(j, "count_cap", "config");
        if (!(cfg.count_cap > 0.0)) throw ConfigError("config: count_cap must be positive");
    }
    if (j.contains("center")) {
        const std::string c = j.at("center").get<std::string>();
        if (c == "empirical")
            cfg.center = CenterMode::empirical;
        else if (c == "asymptotic")
            cfg.center = CenterMode::asymptotic;
        else
            throw ConfigError("config: center must be 'empirical' or 'asymptotic'");
    }
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_integer())
            throw ConfigError("config: threads must be an integer");
        cfg.threads = j.at("threads").get<int>();
        if (cfg.threads < 0) throw ConfigError("config: threads must be >= 0");
    }

    cfg.resolved = config_to_json(cfg);
    return cfg;
}

// The benchmark gas: rho = 1, velocities +-1 with equal weight, unit rods.
// Closed forms: sigma = 1, rho_bar = 1/2, v_eff(v) = 2v, D(+-1) = 1.
inline ExperimentConfig default_benchmark_config() {
    ExperimentConfig cfg;
    cfg.measure = VelocityLengthMeasure({
        MeasureComponent{0.5, DistSpec::atom(1.0), DistSpec::atom(1.0)},
        MeasureComponent{0.5, DistSpec::atom(-1.0), DistSpec::atom(1.0)},
    });
    cfg.rho = 1.0;
    cfg.epsilons = {0.1, 0.01, 0.001};
    cfg.window_half_width = 10.0;
    cfg.euler_times = {0.25, 0.5, 1.0};
    cfg.diffusive_times = {0.25, 0.5, 1.0};
    cfg.replicas = 10000;
    cfg.master_seed = 20240817;
    cfg.out_dir = "out";

    TestFunctionSpec f1;
    f1.spatial = SpatialFactor{SpatialKind::gaussian_bump, 0.0, 2.0, 0.0, 0};
    TestFunctionSpec f2;
    f2.spatial = SpatialFactor{SpatialKind::cosine_packet, 0.5, 0.9, 2.0, 0};
    f2.velocity_poly = {0.0, 1.0}; // g(v) = v
    TestFunctionSpec f3;
    f3.spatial = SpatialFactor{SpatialKind::poly_bump, -1.0, 1.2, 0.0, 0};
    f3.velocity_poly = {0.5, 0.5}; // g(v) = (1 + v)/2, selects the +1 fiber
    cfg.test_functions = {f1, f2, f3};

    cfg.resolved = config_to_json(cfg);
    return cfg;
}

} // namespace hardrods
