/**
 * @file frontier.hpp
 * @brief Efficient frontiers: the dynamic frontier under recursive utility
 *        and the two static parabolic frontiers it is compared against.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include "mvjump/errors.hpp"
#include "mvjump/market.hpp"
#include "mvjump/odes.hpp"

namespace mvjump {

struct BetaResolution {
    double beta = 0.0;
    double mean_T = 0.0;
    double residual = 0.0;  // |beta - 1/(2w) - E[X(T); beta]|
    double slope = 0.0;     // dE[X(T)]/dbeta
};

/// E[X(T)] under the optimal policy built for a given beta.
inline double terminal_mean(const MarketModel& model, const EmbeddingParams& params,
                            const SolutionGrid& phi) {
    const SolutionGrid psi = solve_psi(model, params, phi);
    return solve_mean(model, params, phi, psi).back();
}

/// Solves beta = 1/(2w) + E[X(T); beta]. The terminal mean is affine in
/// beta, so two solves fix the map and a third confirms the root.
inline BetaResolution resolve_beta(const MarketModel& model, double w, double gamma, double x0,
                                   const GridSpec& spec) {
    EmbeddingParams p{w, 0.0, gamma, x0};
    p.check();
    const SolutionGrid phi = solve_phi(model, p, spec);
    const double m0 = terminal_mean(model, p, phi);
    p.beta = 1.0;
    const double m1 = terminal_mean(model, p, phi);

    BetaResolution out;
    out.slope = m1 - m0;
    if (std::abs(1.0 - out.slope) <= 1e-12) {
        throw SingularEmbedding("beta fixed-point map has unit slope");
    }
    out.beta = (0.5 / w + m0) / (1.0 - out.slope);
    p.beta = out.beta;
    out.mean_T = terminal_mean(model, p, phi);
    out.residual = std::abs(out.beta - 0.5 / w - out.mean_T);
    return out;
}

/// Var X(t) = E[X^2](t) - E[X](t)^2 node by node.
inline SolutionGrid variance_curve(const SolutionGrid& mean, const SolutionGrid& second) {
    std::vector<double> v(mean.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double var = second[k] - mean[k] * mean[k];
        if (var < -1e-12) {
            throw NegativeVariance("variance " + std::to_string(var) + " at node " + std::to_string(k));
        }
        v[k] = var < 0.0 ? 0.0 : var;
    }
    return SolutionGrid(mean.spec(), std::move(v));
}

/// d/dt E[X] at node `node`, using the coefficients of cell `cell` (the node
/// must be one of that cell's endpoints).
inline double mean_derivative(const CellTable& cells, const EmbeddingParams& params,
                              const Solution& sol, std::size_t cell, std::size_t node) {
    const auto& m = cells[cell];
    const double c = detail::c_value(params, sol.phi[node], sol.psi[node]);
    return m.rho * sol.mean[node] - m.theta * (sol.mean[node] + c);
}

/// Dynamic frontier written in terms of the mean path only:
///
///     Var X(t) = e^{int_0^t k} x0^2
///              + int_0^t e^{int_s^t k} [(rho - theta) E X(s) - E X'(s)]^2 / theta(s) ds
///              - E X(t)^2,                             k = 2 rho - theta.
///
/// E X' comes from the mean ODE right-hand side. The outer integral is the
/// trapezoidal rule on the solution grid with the Euler-Maclaurin endpoint
/// correction, so its error is O(h^4) per unit time.
inline SolutionGrid recursive_frontier_curve(const MarketModel& model, const Solution& sol) {
    const GridSpec& spec = sol.spec();
    const EmbeddingParams& p = sol.params;
    const CellTable cells(model, spec);
    const double h = spec.step();
    const double sw = p.sqrt_w();

    std::vector<double> var(spec.n + 1);
    var[0] = p.x0 * p.x0 - sol.mean[0] * sol.mean[0];
    double growth = 0.0;  // int_0^t k
    double acc = 0.0;     // running outer integral

    for (std::size_t j = 0; j < spec.n; ++j) {
        const auto& m = cells[j];
        const double kappa = 2.0 * m.rho - m.theta;
        const double pr = detail::phi_rate(m, p);

        // Bracket B and its derivative at one cell endpoint.
        auto bracket = [&](std::size_t node, double& B, double& dB) {
            const double ex = sol.mean[node];
            const double dex = mean_derivative(cells, p, sol, j, node);
            const double phi = sol.phi[node];
            const double psi = sol.psi[node];
            const double dphi = pr * phi;
            const double dpsi = detail::psi_rate(m, p) * psi + detail::psi_source(m, p, phi);
            const double num = psi / sw - 1.0 / p.w;
            const double dC = (dpsi / sw) / phi - num * dphi / (phi * phi);
            const double d2ex = m.rho * dex - m.theta * (dex + dC);
            B = (m.rho - m.theta) * ex - dex;
            dB = (m.rho - m.theta) * dex - d2ex;
        };
        double B0, dB0, B1, dB1;
        bracket(j, B0, dB0);
        bracket(j + 1, B1, dB1);

        const double e = std::exp(kappa * h);
        const double g0 = e * B0 * B0 / m.theta;
        const double g1 = B1 * B1 / m.theta;
        const double dg0 = e * (-kappa * B0 * B0 + 2.0 * B0 * dB0) / m.theta;
        const double dg1 = (-kappa * B1 * B1 + 2.0 * B1 * dB1) / m.theta;
        const double cell_integral = 0.5 * h * (g0 + g1) + h * h / 12.0 * (dg0 - dg1);

        acc = e * acc + cell_integral;
        growth += kappa * h;
        const double ex = sol.mean[j + 1];
        var[j + 1] = std::exp(growth) * p.x0 * p.x0 + acc - ex * ex;
    }
    return SolutionGrid(spec, std::move(var));
}

inline double recursive_frontier_variance(const MarketModel& model, const Solution& sol, double t) {
    return recursive_frontier_curve(model, sol).at(t);
}

namespace detail {

inline double parabola(double mean_T, double x0, double growth, double theta_integral) {
    const double d = mean_T - x0 * std::exp(growth);
    return d * d / std::expm1(theta_integral);
}

}  // namespace detail

/// Static frontier without jumps in the variance rate (theta0 = excess^2 / sigma^2).
inline double zhou_li_variance(const MarketModel& model, double mean_T, double x0) {
    const double T = model.horizon;
    const double growth = integrate_piecewise(model, 0.0, T, [&](double s) { return model.riskfree(s); });
    const double th0 = integrate_piecewise(model, 0.0, T, [&](double s) { return eval_theta0(model, s); });
    if (!(th0 > 0.0)) throw DegenerateVolatility("integral of theta0 must be positive");
    return detail::parabola(mean_T, x0, growth, th0);
}

/// Static frontier with jumps (theta = excess^2 / Lambda).
inline double jump_frontier_variance(const MarketModel& model, double mean_T, double x0) {
    const double T = model.horizon;
    const double growth = integrate_piecewise(model, 0.0, T, [&](double s) { return model.riskfree(s); });
    const double th = integrate_piecewise(model, 0.0, T, [&](double s) { return eval_theta(model, s); });
    return detail::parabola(mean_T, x0, growth, th);
}

/// Closed-form E[X](t_j) by quadrature over the solution grid.
/// `running_inner` selects the exp(-int_0^s) kernel that solves the mean ODE;
/// otherwise the exp(-int_0^t) kernel is used for comparison.
inline double mean_closed_form(const MarketModel& model, const Solution& sol, std::size_t node,
                               bool running_inner = true) {
    const GridSpec& spec = sol.spec();
    const CellTable cells(model, spec);
    const double h = spec.step();
    double K = 0.0;  // int_0^s (rho - theta)
    double integral = 0.0;
    for (std::size_t j = 0; j < node; ++j) {
        const auto& m = cells[j];
        const double k = m.rho - m.theta;
        const double c0 = detail::c_value(sol.params, sol.phi[j], sol.psi[j]);
        const double c1 = detail::c_value(sol.params, sol.phi[j + 1], sol.psi[j + 1]);
        const double w0 = running_inner ? std::exp(-K) : 1.0;
        const double w1 = running_inner ? std::exp(-(K + k * h)) : 1.0;
        integral += 0.5 * h * m.theta * (c0 * w0 + c1 * w1);
        K += k * h;
    }
    if (!running_inner) integral *= std::exp(-K);
    return std::exp(K) * (sol.params.x0 - integral);
}

struct FrontierPoint {
    double w = 0.0;
    double beta = 0.0;
    double lambda_embed = 0.0;
    double mean_T = 0.0;
    double var_T = 0.0;
    double beta_residual = 0.0;
    std::string status = "ok";

    [[nodiscard]] bool ok() const { return status == "ok"; }
};

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.back() = hi;
    return out;
}

/// One efficient portfolio per weight; failures are recorded per point.
inline std::vector<FrontierPoint> sweep_frontier(const MarketModel& model, double gamma, double x0,
                                                 const std::vector<double>& w_grid,
                                                 const GridSpec& spec) {
    std::vector<FrontierPoint> out;
    out.reserve(w_grid.size());
    for (double w : w_grid) {
        FrontierPoint pt;
        pt.w = w;
        try {
            const BetaResolution br = resolve_beta(model, w, gamma, x0, spec);
            const Solution sol = solve_all(model, {w, br.beta, gamma, x0}, spec);
            pt.beta = br.beta;
            pt.beta_residual = br.residual;
            pt.mean_T = sol.mean.back();
            pt.var_T = variance_curve(sol.mean, sol.second_moment).back();
            pt.lambda_embed = 1.0 + 2.0 * w * pt.mean_T;
        } catch (const std::exception& e) {
            pt.status = e.what();
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace mvjump
