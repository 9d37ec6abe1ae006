/**
 * @file commands.hpp
 * @brief File-producing commands behind the `mvjump` tool.
 *
 * Each command reads a RunConfig and writes into an output directory.
 * Numbers are written with 17 significant digits.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>

#include "json.hpp"
#include "mvjump/config.hpp"
#include "mvjump/control.hpp"
#include "mvjump/frontier.hpp"
#include "mvjump/io.hpp"
#include "mvjump/sim.hpp"
#include "mvjump/verify.hpp"

namespace mvjump {

namespace fs = std::filesystem;

inline fs::path prepare_dir(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

/// grids.csv: every deterministic function on the solution grid.
/// policy.csv: the optimal control along the mean wealth path.
inline void cmd_solve(const RunConfig& cfg, const fs::path& out_dir) {
    const GridSpec spec = make_grid_spec(cfg.market, cfg.n_ode);
    const EmbeddingParams params = embedding_from(cfg, spec);
    const Solution s = solve_all(cfg.market, params, spec);
    const SolutionGrid var = variance_curve(s.mean, s.second_moment);
    const FeedbackPolicy pol = FeedbackPolicy::from_mp(cfg.market, s);
    const fs::path dir = prepare_dir(out_dir);

    io::CsvWriter grids(dir / "grids.csv", {"t", "phi", "psi", "P", "Q", "R", "a", "C", "EX", "EX2", "VarX"});
    io::CsvWriter policy(dir / "policy.csv", {"t", "EX", "y", "u_hat", "v_hat"});
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
        const double t = spec.node(k);
        const double a = 1.0 / s.phi[k];
        const double C = detail::c_value(params, s.phi[k], s.psi[k]);
        grids.row(std::vector<double>{t, s.phi[k], s.psi[k], s.P[k], s.Q[k], s.R[k], a, C, s.mean[k],
                                      s.second_moment[k], var[k]});
        const double y = params.sqrt_w() * (s.mean[k] - params.beta);
        const double u = feedback_u(pol, t, y);
        policy.row(std::vector<double>{t, s.mean[k], y, u, u / params.sqrt_w()});
    }
}

inline std::vector<FrontierPoint> sweep_from(const RunConfig& cfg, const GridSpec& spec) {
    const auto ws = log_spaced(cfg.w_grid.min, cfg.w_grid.max, cfg.w_grid.count);
    return sweep_frontier(cfg.market, cfg.gamma, cfg.x0, ws, spec);
}

/// frontier.csv, one row per sweep weight. Returns the number of failed points.
inline std::size_t cmd_frontier(const RunConfig& cfg, const fs::path& out_dir) {
    const GridSpec spec = make_grid_spec(cfg.market, cfg.n_ode);
    const auto pts = sweep_from(cfg, spec);
    const fs::path dir = prepare_dir(out_dir);
    io::CsvWriter csv(dir / "frontier.csv", {"w", "beta", "lambda_embed", "mean_T", "var_T", "std_T", "status"});
    std::size_t failed = 0;
    for (const auto& p : pts) {
        if (!p.ok()) ++failed;
        std::string status = p.status;
        std::replace(status.begin(), status.end(), ',', ';');
        csv.row({io::fmt(p.w), io::fmt(p.beta), io::fmt(p.lambda_embed), io::fmt(p.mean_T), io::fmt(p.var_T),
                 io::fmt(std::sqrt(p.var_T)), status});
    }
    return failed;
}

/// compare.csv: the two static parabolas on a mean grid, next to the
/// dynamic frontier point whose terminal mean is nearest.
inline void cmd_compare_frontiers(const RunConfig& cfg, const fs::path& out_dir,
                                  std::optional<double> mean_min, std::optional<double> mean_max,
                                  std::optional<std::size_t> steps) {
    const GridSpec spec = make_grid_spec(cfg.market, cfg.n_ode);
    std::vector<FrontierPoint> pts;
    for (auto& p : sweep_from(cfg, spec)) {
        if (p.ok()) pts.push_back(p);
    }
    if (pts.empty()) throw Error("no frontier point could be computed");

    const double vertex = cfg.x0 * std::exp(integrate_piecewise(cfg.market, 0.0, cfg.market.horizon,
                                                                [&](double s) { return cfg.market.riskfree(s); }));
    double top = vertex;
    for (const auto& p : pts) top = std::max(top, p.mean_T);
    const double lo = mean_min ? *mean_min : cfg.compare.mean_min.value_or(vertex);
    const double hi = mean_max ? *mean_max : cfg.compare.mean_max.value_or(top);
    const std::size_t n = steps ? *steps : cfg.compare.steps;
    if (n < 2 || !(hi > lo)) throw ConfigError("compare needs mean_max > mean_min and steps >= 2");

    const fs::path dir = prepare_dir(out_dir);
    io::CsvWriter csv(dir / "compare.csv",
                      {"mean_T", "var_zhou_li", "var_jump", "var_recursive_at_T", "w_nearest", "mean_T_nearest"});
    for (std::size_t i = 0; i < n; ++i) {
        const double m = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto near = std::min_element(pts.begin(), pts.end(), [m](const auto& a, const auto& b) {
            return std::abs(a.mean_T - m) < std::abs(b.mean_T - m);
        });
        csv.row(std::vector<double>{m, zhou_li_variance(cfg.market, m, cfg.x0),
                                    jump_frontier_variance(cfg.market, m, cfg.x0), near->var_T, near->w,
                                    near->mean_T});
    }
}

/// simulation.json with the Monte Carlo summary; paths.csv on request.
inline ojson cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, bool write_paths = false) {
    const GridSpec spec = make_grid_spec(cfg.market, cfg.n_ode);
    const EmbeddingParams params = embedding_from(cfg, spec);
    const Solution s = solve_all(cfg.market, params, spec);
    const PathEnsemble ens = simulate(cfg.market, FeedbackPolicy::from_mp(cfg.market, s), cfg.sim);
    const Estimate y0 = estimate_Y0(cfg.market, params, ens);

    ojson summary;
    summary["n_paths"] = cfg.sim.n_paths;
    summary["dt"] = cfg.sim.dt;
    summary["seed"] = cfg.sim.seed;
    summary["excluded_paths"] = ens.excluded;
    summary["mean_T"] = ens.wealth.mean;
    summary["se_mean"] = ens.wealth.se_mean;
    summary["var_T"] = ens.wealth.variance;
    summary["se_var"] = ens.wealth.se_var;
    summary["Y0_hat"] = y0.value;
    summary["se_Y0"] = y0.se;

    const fs::path dir = prepare_dir(out_dir);
    io::write_text(dir / "simulation.json", summary.dump(2) + "\n");
    if (write_paths) {
        io::CsvWriter csv(dir / "paths.csv", {"path", "X_T", "jumps", "valid"});
        for (std::size_t i = 0; i < ens.terminal_wealth.size(); ++i) {
            csv.row({std::to_string(i), io::fmt(ens.terminal_wealth[i]), std::to_string(ens.jump_counts[i]),
                     ens.valid[i] ? "1" : "0"});
        }
    }
    return summary;
}

/// verify.json; returns true iff every check passed.
inline bool cmd_verify(const RunConfig& cfg, const fs::path& out_dir, bool timestamp = true) {
    const ojson report = run_verify(cfg, timestamp);
    const fs::path dir = prepare_dir(out_dir);
    io::write_text(dir / "verify.json", report.dump(2) + "\n");
    return report["pass"].get<bool>();
}

}  // namespace mvjump
