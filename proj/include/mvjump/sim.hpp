/**
 * @file sim.hpp
 * @brief Monte Carlo simulation of controlled wealth with compound-Poisson
 *        jumps, used to cross-check the deterministic solution.
 *
 * Euler-Maruyama per step of length dt, control evaluated at the left end:
 *
 *     X <- X + [rho X + (mu - rho) v] dt + sigma v dB
 *            + v sum_i size_i (dN_i - rate_i dt)
 *
 * dB ~ N(0, dt), dN_i ~ Poisson(rate_i dt). The recursive utility
 *
 *     Y(0) = E[ e^{-gamma T} (-y(T)^2 / 2)
 *              + int_0^T e^{-gamma s} (rho X + (mu - rho) v) ds ]
 *
 * is the discounted form of the linear backward equation with driver
 * f - gamma Y; the time integral uses the left-endpoint rule.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "mvjump/control.hpp"
#include "mvjump/errors.hpp"
#include "mvjump/market.hpp"
#include "mvjump/odes.hpp"
#include "mvjump/rng.hpp"

namespace mvjump {

struct SimConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 42;
    bool antithetic = false;
    unsigned workers = 0;  // 0: hardware concurrency

    [[nodiscard]] std::size_t steps(double horizon) const {
        if (!(dt > 0.0)) throw DomainError("sim.dt must be > 0");
        const double raw = horizon / dt;
        const auto n = static_cast<std::size_t>(std::llround(raw));
        if (n < 1 || std::abs(static_cast<double>(n) * dt - horizon) > 1e-9) {
            throw DomainError("sim.dt must divide the horizon into an integer number of steps");
        }
        return n;
    }
};

/// Fixed-order pairwise sum; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;  // unbiased
    double se_mean = 0.0;
    double se_var = 0.0;
};

/// Summary statistics of a sample. With `paired`, consecutive entries are
/// antithetic pairs and the standard error of the mean uses pair averages.
inline SampleStats sample_stats(std::span<const double> x, bool paired = false) {
    SampleStats s;
    s.n = x.size();
    if (s.n == 0) return s;
    const double n = static_cast<double>(s.n);
    s.mean = pairwise_sum(x) / n;
    std::vector<double> work(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) work[i] = x[i] * x[i];
    s.second_moment = pairwise_sum(work) / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - s.mean;
        work[i] = d * d;
    }
    const double m2 = pairwise_sum(work) / n;
    for (std::size_t i = 0; i < x.size(); ++i) work[i] = work[i] * work[i];
    const double m4 = pairwise_sum(work) / n;
    s.variance = s.n > 1 ? m2 * n / (n - 1.0) : 0.0;
    s.se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    if (paired && s.n >= 4) {
        std::vector<double> pairs(s.n / 2);
        for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
        const SampleStats ps = sample_stats(pairs, false);
        s.se_mean = ps.se_mean;
    } else {
        s.se_mean = s.n > 1 ? std::sqrt(s.variance / n) : 0.0;
    }
    return s;
}

/// Market coefficients sampled at the left end of every simulation step.
struct StepTable {
    std::vector<double> t, rho, mu, sigma, discount;
    std::vector<std::vector<double>> size;       // [mark][step]
    std::vector<std::vector<double>> jump_mean;  // rate * dt
    std::vector<std::vector<double>> jump_p0;    // exp(-rate * dt)

    StepTable(const MarketModel& model, double gamma, std::size_t steps, double dt) {
        t.resize(steps);
        rho.resize(steps);
        mu.resize(steps);
        sigma.resize(steps);
        discount.resize(steps);
        size.assign(model.jumps.size(), std::vector<double>(steps));
        jump_mean.assign(model.jumps.size(), std::vector<double>(steps));
        jump_p0.assign(model.jumps.size(), std::vector<double>(steps));
        for (std::size_t k = 0; k < steps; ++k) {
            t[k] = static_cast<double>(k) * dt;
            rho[k] = model.riskfree(t[k]);
            mu[k] = model.drift(t[k]);
            sigma[k] = model.vol(t[k]);
            discount[k] = std::exp(-gamma * t[k]);
            for (std::size_t i = 0; i < model.jumps.size(); ++i) {
                size[i][k] = model.jumps[i].size(t[k]);
                jump_mean[i][k] = model.jumps[i].rate * dt;
                jump_p0[i][k] = std::exp(-jump_mean[i][k]);
            }
        }
    }
};

/// Optimal wealth-feedback policy tabulated on the simulation steps. Uses
/// the same expression as `feedback_v` with phi, psi read off the grids once
/// per step instead of once per path and step.
class TabulatedPolicy {
public:
    TabulatedPolicy(const FeedbackPolicy& pol, const SimConfig& cfg) {
        const std::size_t steps = cfg.steps(pol.model.horizon);
        const double sw = pol.params.sqrt_w();
        beta_ = pol.params.beta;
        sw_ = sw;
        scale_.resize(steps);
        f_.resize(steps);
        g_.resize(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            const MarketPoint m = market_point(pol.model, t);
            f_[k] = pol.first.at(t);
            g_[k] = pol.second.at(t);
            scale_[k] = (m.rho - m.mu) / (sw * f_[k] * m.lambda);
        }
    }

    double operator()(std::size_t step, double /*t*/, double wealth) const {
        return scale_[step] * (f_[step] * sw_ * (wealth - beta_) + g_[step] - 1.0 / sw_);
    }

private:
    std::vector<double> scale_, f_, g_;
    double beta_ = 0.0;
    double sw_ = 1.0;
};

struct PathResult {
    double terminal_wealth = 0.0;
    double running_reward = 0.0;  // int_0^T e^{-gamma s} (rho X + (mu - rho) v) ds
    std::uint64_t jumps = 0;
    bool finite = true;
};

struct PathRecord {
    std::vector<double> times;    // step boundaries, steps + 1 entries
    std::vector<double> wealth;   // X at each boundary
    std::vector<double> control;  // v on each step (steps entries)
    std::uint64_t jumps = 0;
};

namespace detail {

template <class Control>
PathResult run_path(const StepTable& tab, double x0, double dt, const Control& control,
                    const SimConfig& cfg, std::size_t path, PathRecord* record) {
    const bool mirror = cfg.antithetic && (path % 2 == 1);
    const std::uint64_t stream_id = cfg.antithetic ? path / 2 : path;
    const PathStream rng(cfg.seed, stream_id);
    const double sqdt = std::sqrt(dt);
    const std::size_t steps = tab.t.size();
    const std::size_t marks = tab.size.size();

    PathResult out;
    double X = x0;
    std::array<double, 2> normals{};
    if (record) {
        record->times.assign(1, 0.0);
        record->wealth.assign(1, X);
        record->control.clear();
    }
    for (std::size_t k = 0; k < steps; ++k) {
        const auto step = static_cast<std::uint32_t>(k);
        const double v = control(k, tab.t[k], X);
        const double drift = tab.rho[k] * X + (tab.mu[k] - tab.rho[k]) * v;
        out.running_reward += tab.discount[k] * drift * dt;

        if ((k & 1u) == 0) normals = rng.normal_pair(step >> 1);
        double z = normals[k & 1u];
        if (mirror) z = -z;
        double jump = 0.0;
        for (std::size_t i = 0; i < marks; ++i) {
            const double mean = tab.jump_mean[i][k];
            if (mean == 0.0) continue;
            double u = rng.uniform(step, static_cast<std::uint32_t>(i));
            if (mirror) u = 1.0 - u;
            const std::uint32_t dn = poisson_inverse(u, mean, tab.jump_p0[i][k]);
            out.jumps += dn;
            jump += tab.size[i][k] * (static_cast<double>(dn) - mean);
        }
        X += drift * dt + tab.sigma[k] * v * sqdt * z + v * jump;
        if (record) {
            record->times.push_back(static_cast<double>(k + 1) * dt);
            record->wealth.push_back(X);
            record->control.push_back(v);
        }
    }
    out.terminal_wealth = X;
    out.finite = std::isfinite(X) && std::isfinite(out.running_reward);
    if (record) record->jumps = out.jumps;
    return out;
}

inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

struct PathEnsemble {
    std::vector<double> times;
    std::vector<double> terminal_wealth;
    std::vector<double> running_reward;
    std::vector<std::uint64_t> jump_counts;
    std::vector<char> valid;
    std::size_t excluded = 0;
    SampleStats wealth;  // over valid paths
    SimConfig config;
};

/// Simulates `cfg.n_paths` paths under `control`, a callable
/// `double(std::size_t step, double t, double wealth)` giving the amount
/// held in the stock. The result does not depend on `cfg.workers`.
template <class Control>
PathEnsemble simulate(const MarketModel& model, const EmbeddingParams& params,
                      const Control& control, const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw DomainError("sim.n_paths must be >= 1");
    const std::size_t steps = cfg.steps(model.horizon);
    const StepTable tab(model, params.gamma, steps, cfg.dt);

    PathEnsemble ens;
    ens.config = cfg;
    ens.times.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) ens.times[k] = static_cast<double>(k) * cfg.dt;
    ens.terminal_wealth.resize(cfg.n_paths);
    ens.running_reward.resize(cfg.n_paths);
    ens.jump_counts.resize(cfg.n_paths);
    ens.valid.resize(cfg.n_paths);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PathResult r = detail::run_path(tab, params.x0, cfg.dt, control, cfg, i, nullptr);
            ens.terminal_wealth[i] = r.terminal_wealth;
            ens.running_reward[i] = r.running_reward;
            ens.jump_counts[i] = r.jumps;
            ens.valid[i] = r.finite ? 1 : 0;
        }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(detail::resolve_workers(cfg.workers), cfg.n_paths));
    if (workers <= 1) {
        work(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (cfg.n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = std::min(cfg.n_paths, w * chunk);
            const std::size_t e = std::min(cfg.n_paths, b + chunk);
            pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> good;
    good.reserve(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        if (ens.valid[i]) {
            good.push_back(ens.terminal_wealth[i]);
        } else {
            ++ens.excluded;
        }
    }
    ens.wealth = sample_stats(good, cfg.antithetic && ens.excluded == 0);
    return ens;
}

inline PathEnsemble simulate(const MarketModel& model, const FeedbackPolicy& policy,
                             const SimConfig& cfg) {
    const TabulatedPolicy control(policy, cfg);
    return simulate(model, policy.params, control, cfg);
}

/// Full trajectory of a single path, identical to path `path` of `simulate`.
template <class Control>
PathRecord simulate_path(const MarketModel& model, const EmbeddingParams& params,
                         const Control& control, const SimConfig& cfg, std::size_t path) {
    const std::size_t steps = cfg.steps(model.horizon);
    const StepTable tab(model, params.gamma, steps, cfg.dt);
    PathRecord rec;
    detail::run_path(tab, params.x0, cfg.dt, control, cfg, path, &rec);
    return rec;
}

/// `count` equally spaced (t, y) states along path 0 of the optimal policy.
inline std::vector<PathState> sample_path_states(const MarketModel& model, const FeedbackPolicy& policy,
                                                 const SimConfig& cfg, std::size_t count = 64) {
    const TabulatedPolicy control(policy, cfg);
    const PathRecord rec = simulate_path(model, policy.params, control, cfg, 0);
    const std::size_t steps = rec.times.size() - 1;
    std::vector<PathState> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = count == 1 ? 0 : (i * steps + (count - 1) / 2) / (count - 1);
        const double X = rec.wealth[k];
        out.push_back({rec.times[k], policy.params.sqrt_w() * (X - policy.params.beta)});
    }
    return out;
}

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Per-path samples of the discounted recursive-utility functional.
inline std::vector<double> utility_samples(const MarketModel& model, const EmbeddingParams& params,
                                           const PathEnsemble& ens) {
    const double terminal_discount = std::exp(-params.gamma * model.horizon);
    std::vector<double> out;
    out.reserve(ens.terminal_wealth.size());
    for (std::size_t i = 0; i < ens.terminal_wealth.size(); ++i) {
        if (!ens.valid[i]) continue;
        const double y = params.sqrt_w() * (ens.terminal_wealth[i] - params.beta);
        out.push_back(terminal_discount * (-0.5 * y * y) + ens.running_reward[i]);
    }
    return out;
}

inline Estimate estimate_Y0(const MarketModel& model, const EmbeddingParams& params,
                            const PathEnsemble& ens) {
    const auto samples = utility_samples(model, params, ens);
    const SampleStats s = sample_stats(samples, ens.config.antithetic && ens.excluded == 0);
    return {s.mean, s.se_mean};
}

struct PerturbationRow {
    double eps = 0.0;
    double cost = 0.0;     // -Y_eps(0)
    double se = 0.0;
    double diff = 0.0;     // cost_eps - cost_0, paired; positive means worse
    double se_diff = 0.0;
    bool pass = true;
};

struct PerturbationReport {
    std::vector<PerturbationRow> rows;  // sorted by eps, includes eps = 0
    bool convex = true;
    bool pass = true;
};

/// Scales the optimal amount by (1 + eps) and re-simulates with common
/// random numbers. Each perturbed cost must not fall more than three paired
/// standard errors below the optimal cost.
inline PerturbationReport perturbation_optimality_check(const MarketModel& model,
                                                        const FeedbackPolicy& policy,
                                                        const SimConfig& cfg,
                                                        std::vector<double> eps_grid) {
    if (std::find(eps_grid.begin(), eps_grid.end(), 0.0) == eps_grid.end()) eps_grid.push_back(0.0);
    std::sort(eps_grid.begin(), eps_grid.end());

    const TabulatedPolicy base(policy, cfg);
    const EmbeddingParams& params = policy.params;
    const double terminal_discount = std::exp(-params.gamma * model.horizon);
    // Utility per path index; NaN marks an excluded path.
    auto by_path = [&](const PathEnsemble& ens) {
        std::vector<double> out(ens.terminal_wealth.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double y = params.sqrt_w() * (ens.terminal_wealth[i] - params.beta);
            out[i] = ens.valid[i] ? terminal_discount * (-0.5 * y * y) + ens.running_reward[i]
                                  : std::nan("");
        }
        return out;
    };
    const auto opt = by_path(simulate(model, params, base, cfg));

    PerturbationReport rep;
    for (double eps : eps_grid) {
        const auto scaled = [&base, eps](std::size_t k, double t, double x) {
            return (1.0 + eps) * base(k, t, x);
        };
        const auto ys = eps == 0.0 ? opt : by_path(simulate(model, params, scaled, cfg));
        std::vector<double> cost, diff;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            if (std::isnan(ys[i]) || std::isnan(opt[i])) continue;
            cost.push_back(-ys[i]);
            diff.push_back(opt[i] - ys[i]);
        }
        const bool paired = cfg.antithetic && cost.size() == ys.size();
        const SampleStats cs = sample_stats(cost, paired);
        const SampleStats ds = sample_stats(diff, paired);
        PerturbationRow row;
        row.eps = eps;
        row.cost = cs.mean;
        row.se = cs.se_mean;
        row.diff = ds.mean;
        row.se_diff = ds.se_mean;
        row.pass = row.diff >= -3.0 * row.se_diff;
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(row);
    }
    for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i - 1];
        const auto& b = rep.rows[i];
        const auto& c = rep.rows[i + 1];
        const double left = (b.cost - a.cost) / (b.eps - a.eps);
        const double right = (c.cost - b.cost) / (c.eps - b.eps);
        if (right < left) rep.convex = false;
    }
    return rep;
}

}  // namespace mvjump
