/**
 * @file config.hpp
 * @brief Run configuration: a JSON document, schema version 1.
 *
 *     {
 *       "schema_version": 1,
 *       "market": {
 *         "horizon": 1.0,
 *         "rho":   0.06,                      // number, or
 *         "mu":    {"breakpoints": [0, 0.5, 1], "values": [0.12, 0.10]},
 *         "sigma": 0.15,
 *         "jumps": [{"rate": 2.0, "size": 0.10}]
 *       },
 *       "embedding": {"w": 1.0, "beta": 0.5, "gamma": 0.2, "x0": 1.0,
 *                     "w_grid": {"min": 0.1, "max": 10.0, "count": 32}},
 *       "solver": {"n_ode": 10000},
 *       "sim": {"n_paths": 100000, "dt": 0.001, "seed": 42,
 *               "antithetic": false, "workers": 0},
 *       "compare": {"mean_min": 1.0, "mean_max": 1.4, "steps": 101},
 *       "output": {"directory": "out"}
 *     }
 *
 * Omitting "embedding.beta" resolves beta from the weight self-consistently.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvjump/errors.hpp"
#include "mvjump/market.hpp"
#include "mvjump/sim.hpp"

namespace mvjump {

inline constexpr int kSchemaVersion = 1;

struct WeightGrid {
    double min = 0.1;
    double max = 10.0;
    std::size_t count = 32;
};

struct CompareSpec {
    std::optional<double> mean_min;
    std::optional<double> mean_max;
    std::size_t steps = 101;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    MarketModel market;
    std::optional<double> w;
    std::optional<double> beta;
    double gamma = 0.0;
    double x0 = 1.0;
    WeightGrid w_grid;
    std::size_t n_ode = 10000;
    SimConfig sim;
    CompareSpec compare;
    std::string output_dir = "out";
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError("missing field " + path + key);
    return obj.at(key);
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path + " must be finite");
    return d;
}

inline std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(path + " must be an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) throw ConfigError(path + " must be >= 0");
    return v.get<std::uint64_t>();
}

inline PiecewiseConstantFn as_piecewise(const json& v, double horizon, const std::string& path) {
    if (v.is_number()) return PiecewiseConstantFn::constant(horizon, as_number(v, path));
    if (!v.is_object()) throw ConfigError(path + " must be a number or {breakpoints, values}");
    std::vector<double> bps, vals;
    for (const auto& b : require(v, "breakpoints", path + ".")) bps.push_back(as_number(b, path + ".breakpoints"));
    for (const auto& x : require(v, "values", path + ".")) vals.push_back(as_number(x, path + ".values"));
    try {
        return PiecewiseConstantFn(std::move(bps), std::move(vals));
    } catch (const DomainError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace detail

/// Parses and validates a configuration document. Market assumptions are
/// checked by `validate`; its ModelError propagates unchanged.
inline RunConfig load_config(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    RunConfig cfg;
    const int version = static_cast<int>(detail::as_count(detail::require(doc, "schema_version", ""), "schema_version"));
    if (version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(version));
    }
    cfg.schema_version = version;

    const json& m = detail::require(doc, "market", "");
    const double T = detail::as_number(detail::require(m, "horizon", "market."), "market.horizon");
    if (!(T > 0.0)) throw ConfigError("market.horizon must be > 0");
    cfg.market.horizon = T;
    cfg.market.riskfree = detail::as_piecewise(detail::require(m, "rho", "market."), T, "market.rho");
    cfg.market.drift = detail::as_piecewise(detail::require(m, "mu", "market."), T, "market.mu");
    cfg.market.vol = detail::as_piecewise(detail::require(m, "sigma", "market."), T, "market.sigma");
    if (m.contains("jumps")) {
        const json& jumps = m.at("jumps");
        if (!jumps.is_array()) throw ConfigError("market.jumps must be an array");
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const std::string p = "market.jumps[" + std::to_string(i) + "]";
            JumpMark mark;
            mark.rate = detail::as_number(detail::require(jumps[i], "rate", p + "."), p + ".rate");
            mark.size = detail::as_piecewise(detail::require(jumps[i], "size", p + "."), T, p + ".size");
            cfg.market.jumps.push_back(std::move(mark));
        }
    }
    cfg.market = validate(std::move(cfg.market));

    const json& e = detail::require(doc, "embedding", "");
    cfg.gamma = detail::as_number(detail::require(e, "gamma", "embedding."), "embedding.gamma");
    cfg.x0 = detail::as_number(detail::require(e, "x0", "embedding."), "embedding.x0");
    if (!(cfg.gamma >= 0.0)) throw ConfigError("embedding.gamma must be >= 0");
    if (!(cfg.x0 > 0.0)) throw ConfigError("embedding.x0 must be > 0");
    if (e.contains("w")) {
        cfg.w = detail::as_number(e.at("w"), "embedding.w");
        if (!(*cfg.w > 0.0)) throw ConfigError("embedding.w must be > 0");
    }
    if (e.contains("beta")) cfg.beta = detail::as_number(e.at("beta"), "embedding.beta");
    if (e.contains("w_grid")) {
        const json& g = e.at("w_grid");
        cfg.w_grid.min = detail::as_number(detail::require(g, "min", "embedding.w_grid."), "embedding.w_grid.min");
        cfg.w_grid.max = detail::as_number(detail::require(g, "max", "embedding.w_grid."), "embedding.w_grid.max");
        cfg.w_grid.count = detail::as_count(detail::require(g, "count", "embedding.w_grid."), "embedding.w_grid.count");
        if (!(cfg.w_grid.min > 0.0) || !(cfg.w_grid.max >= cfg.w_grid.min) || cfg.w_grid.count < 1) {
            throw ConfigError("embedding.w_grid needs 0 < min <= max and count >= 1");
        }
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        if (s.contains("n_ode")) cfg.n_ode = detail::as_count(s.at("n_ode"), "solver.n_ode");
        if (cfg.n_ode < 1) throw ConfigError("solver.n_ode must be >= 1");
    }

    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        if (s.contains("n_paths")) cfg.sim.n_paths = detail::as_count(s.at("n_paths"), "sim.n_paths");
        if (s.contains("dt")) cfg.sim.dt = detail::as_number(s.at("dt"), "sim.dt");
        if (s.contains("seed")) cfg.sim.seed = detail::as_count(s.at("seed"), "sim.seed");
        if (s.contains("antithetic")) {
            if (!s.at("antithetic").is_boolean()) throw ConfigError("sim.antithetic must be a boolean");
            cfg.sim.antithetic = s.at("antithetic").get<bool>();
        }
        if (s.contains("workers")) cfg.sim.workers = static_cast<unsigned>(detail::as_count(s.at("workers"), "sim.workers"));
    }
    if (cfg.sim.n_paths < 1) throw ConfigError("sim.n_paths must be >= 1");
    try {
        (void)cfg.sim.steps(T);
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }

    if (doc.contains("compare")) {
        const json& c = doc.at("compare");
        if (c.contains("mean_min")) cfg.compare.mean_min = detail::as_number(c.at("mean_min"), "compare.mean_min");
        if (c.contains("mean_max")) cfg.compare.mean_max = detail::as_number(c.at("mean_max"), "compare.mean_max");
        if (c.contains("steps")) cfg.compare.steps = detail::as_count(c.at("steps"), "compare.steps");
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) throw ConfigError("output.directory must be a string");
            cfg.output_dir = o.at("directory").get<std::string>();
        }
    }
    return cfg;
}

}  // namespace mvjump
