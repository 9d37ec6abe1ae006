/**
 * @file odes.hpp
 * @brief Deterministic functions behind the optimal mean-variance policy.
 *
 * Maximum-principle side (adjoint ansatz p = (phi * y + psi) q):
 *
 *     phi' = (theta - 2 rho + gamma) phi,                         phi(T) = 1
 *     psi' = (theta - rho + gamma) psi - sqrt(w) beta rho phi
 *            + (rho - theta) / sqrt(w),                           psi(T) = 0
 *
 * Dynamic-programming side (V(t, y) = P y^2 / 2 + Q y + R):
 *
 *     P' = (theta + gamma - 2 rho) P,                             P(T) = 1
 *     Q' = (theta + gamma - rho) Q - sqrt(w) beta rho P
 *          + (rho - theta) / sqrt(w),                             Q(T) = 0
 *     R' = gamma R + rho beta - sqrt(w) beta rho Q
 *          + theta (Q - 1/sqrt(w))^2 / (2 P),                     R(T) = 0
 *
 * Forward moments of the optimally controlled wealth, with a = 1/phi and
 * C = -beta + a psi / sqrt(w) - a / w:
 *
 *     E[X]'   = (rho - theta) E[X] - theta C,                     E[X](0)   = x0
 *     E[X^2]' = (2 rho - theta) E[X^2] + theta C^2,               E[X^2](0) = x0^2
 *
 * The MP solves build their rates from the unreduced form
 * (mu - rho)^2 / Lambda, the DPP solves from theta; both share the RK4
 * integrator in ode.hpp.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mvjump/errors.hpp"
#include "mvjump/grid.hpp"
#include "mvjump/market.hpp"
#include "mvjump/ode.hpp"

namespace mvjump {

/// Parameters introduced by embedding the mean-variance problem into a
/// quadratic control problem: y = sqrt(w) (X - beta), u = sqrt(w) v.
struct EmbeddingParams {
    double w = 1.0;      // Lagrange weight
    double beta = 0.0;   // wealth shift
    double gamma = 0.0;  // consumption (discount) rate of the recursive utility
    double x0 = 1.0;     // initial wealth

    [[nodiscard]] double sqrt_w() const { return std::sqrt(w); }
    [[nodiscard]] double y0() const { return sqrt_w() * (x0 - beta); }

    void check() const {
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("embedding weight w must be > 0");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
        if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("initial wealth x0 must be > 0");
        if (!std::isfinite(beta)) throw DomainError("beta must be finite");
    }
};

/// Market coefficients sampled once per grid cell (at the cell midpoint).
class CellTable {
public:
    CellTable(const MarketModel& model, const GridSpec& spec) {
        spec.check();
        cells_.reserve(spec.n);
        for (std::size_t k = 0; k < spec.n; ++k) cells_.push_back(market_point(model, spec.cell_mid(k)));
    }
    [[nodiscard]] const MarketPoint& operator[](std::size_t k) const { return cells_[k]; }
    [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }

private:
    std::vector<MarketPoint> cells_;
};

/// Which right-hand side to use for R. `Derived` is what completing the
/// square in the generalized Hamiltonian produces; the other two reproduce
/// alternative sign and shift choices so they can be compared by Monte Carlo.
enum class RVariant {
    Derived,        // - sqrt(w) beta rho Q,  (Q - 1/sqrt(w))^2
    PlusCross,      // + sqrt(w) beta rho Q,  (Q - 1/sqrt(w))^2
    UnitShift,      // + sqrt(w) beta rho Q,  (Q - 1)^2
};

inline const char* to_string(RVariant v) {
    switch (v) {
        case RVariant::Derived: return "derived";
        case RVariant::PlusCross: return "plus_cross";
        case RVariant::UnitShift: return "unit_shift";
    }
    return "?";
}

namespace detail {

inline double mp_theta(const MarketPoint& m) {
    const double d = m.rho - m.mu;
    return d * d / m.lambda;
}

// MP side, unreduced form.
inline double phi_rate(const MarketPoint& m, const EmbeddingParams& p) {
    return mp_theta(m) - 2.0 * m.rho + p.gamma;
}
inline double psi_rate(const MarketPoint& m, const EmbeddingParams& p) {
    return mp_theta(m) - m.rho + p.gamma;
}
inline double psi_source(const MarketPoint& m, const EmbeddingParams& p, double phi) {
    const double sw = p.sqrt_w();
    return -mp_theta(m) / sw - phi * sw * p.beta * m.rho + m.rho / sw;
}

// DPP side, theta form.
inline double P_rate(const MarketPoint& m, const EmbeddingParams& p) {
    return m.theta + p.gamma - 2.0 * m.rho;
}
inline double Q_rate(const MarketPoint& m, const EmbeddingParams& p) {
    return m.theta + p.gamma - m.rho;
}
inline double Q_source(const MarketPoint& m, const EmbeddingParams& p, double P) {
    const double sw = p.sqrt_w();
    return -sw * p.beta * m.rho * P + m.rho / sw - m.theta / sw;
}
inline double R_source(const MarketPoint& m, const EmbeddingParams& p, double P, double Q,
                       RVariant variant) {
    const double sw = p.sqrt_w();
    const double shift = variant == RVariant::UnitShift ? 1.0 : 1.0 / sw;
    const double cross = variant == RVariant::Derived ? -1.0 : 1.0;
    const double gap = Q - shift;
    return m.rho * p.beta + cross * Q * sw * p.beta * m.rho + m.theta * gap * gap / (2.0 * P);
}

inline double c_value(const EmbeddingParams& p, double phi, double psi) {
    const double a = 1.0 / phi;
    return -p.beta + a * psi / p.sqrt_w() - a / p.w;
}

// Stage values of the coupled functions, fourth-order at cell midpoints.
inline double phi_at(const SolutionGrid& phi, const CellTable& cells, const EmbeddingParams& p,
                     const Stage& s, bool dpp) {
    const auto& m = cells[s.cell];
    const double r = dpp ? P_rate(m, p) : phi_rate(m, p);
    return stage_value(phi, s, r * phi[s.cell], r * phi[s.cell + 1]);
}

inline double psi_at(const SolutionGrid& phi, const SolutionGrid& psi, const CellTable& cells,
                     const EmbeddingParams& p, const Stage& s, bool dpp) {
    const auto& m = cells[s.cell];
    const std::size_t k = s.cell;
    auto slope = [&](std::size_t node) {
        return dpp ? Q_rate(m, p) * psi[node] + Q_source(m, p, phi[node])
                   : psi_rate(m, p) * psi[node] + psi_source(m, p, phi[node]);
    };
    return stage_value(psi, s, slope(k), slope(k + 1));
}

}  // namespace detail

inline SolutionGrid solve_phi(const MarketModel& model, const EmbeddingParams& params,
                              const GridSpec& spec) {
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return detail::phi_rate(cells[s.cell], params); },
        [](const Stage&) { return 0.0; }, 1.0, Direction::Backward, spec);
}

inline SolutionGrid solve_P(const MarketModel& model, const EmbeddingParams& params,
                            const GridSpec& spec) {
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return detail::P_rate(cells[s.cell], params); },
        [](const Stage&) { return 0.0; }, 1.0, Direction::Backward, spec);
}

inline SolutionGrid solve_psi(const MarketModel& model, const EmbeddingParams& params,
                              const SolutionGrid& phi) {
    const GridSpec& spec = phi.spec();
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return detail::psi_rate(cells[s.cell], params); },
        [&](const Stage& s) {
            const double f = detail::phi_at(phi, cells, params, s, false);
            return detail::psi_source(cells[s.cell], params, f);
        },
        0.0, Direction::Backward, spec);
}

inline SolutionGrid solve_Q(const MarketModel& model, const EmbeddingParams& params,
                            const SolutionGrid& P) {
    const GridSpec& spec = P.spec();
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return detail::Q_rate(cells[s.cell], params); },
        [&](const Stage& s) {
            const double p = detail::phi_at(P, cells, params, s, true);
            return detail::Q_source(cells[s.cell], params, p);
        },
        0.0, Direction::Backward, spec);
}

inline SolutionGrid solve_R(const MarketModel& model, const EmbeddingParams& params,
                            const SolutionGrid& P, const SolutionGrid& Q,
                            RVariant variant = RVariant::Derived) {
    const GridSpec& spec = P.spec();
    if (!(Q.spec() == spec)) throw DomainError("P and Q must share one grid");
    for (std::size_t k = 0; k < P.size(); ++k) {
        if (!(P[k] > 0.0)) throw DivisionByZero("P <= 0 at node " + std::to_string(k));
    }
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage&) { return params.gamma; },
        [&](const Stage& s) {
            const double p = detail::phi_at(P, cells, params, s, true);
            const double q = detail::psi_at(P, Q, cells, params, s, true);
            return detail::R_source(cells[s.cell], params, p, q, variant);
        },
        0.0, Direction::Backward, spec);
}

/// phi(t) = exp(-int_t^T (theta - 2 rho + gamma)), integrated exactly.
inline double closed_form_phi(const MarketModel& model, const EmbeddingParams& params, double t) {
    const double expo = integrate_piecewise(model, t, model.horizon, [&](double s) {
        return eval_theta(model, s) - 2.0 * model.riskfree(s) + params.gamma;
    });
    return std::exp(-expo);
}

inline double eval_a(const MarketModel& model, const EmbeddingParams& params, double t) {
    return 1.0 / closed_form_phi(model, params, t);
}

inline double eval_C(const MarketModel& model, const EmbeddingParams& params,
                     const SolutionGrid& psi, double t) {
    const double a = eval_a(model, params, t);
    return -params.beta + a * psi.at(t) / params.sqrt_w() - a / params.w;
}

/// Closed-form variants for psi. The variation-of-constants form solves the
/// psi ODE; the other two use different inner kernels and are kept for comparison.
enum class PsiForm {
    VariationOfConstants,  // inner exp(-int_t^s (theta - rho + gamma))
    TerminalInner,         // inner exp(-int_t^T (theta - 2 rho + gamma))
    RunningInner,          // inner exp(-int_t^s (theta - 2 rho + gamma))
};

inline double closed_form_psi(const MarketModel& model, const EmbeddingParams& params, double t,
                              PsiForm form = PsiForm::VariationOfConstants) {
    model.check_time(t);
    const double T = model.horizon;
    const double sw = params.sqrt_w();
    auto rate_a = [&](double s) { return eval_theta(model, s) - 2.0 * model.riskfree(s) + params.gamma; };
    auto rate_b = [&](double s) { return eval_theta(model, s) - model.riskfree(s) + params.gamma; };
    const double A = integrate_piecewise(model, t, T, rate_a);
    const double B = integrate_piecewise(model, t, T, rate_b);
    const double shift = sw * params.beta * (std::exp(-A) - std::exp(-B));

    if (form == PsiForm::TerminalInner) {
        const double inner = integrate_piecewise(model, t, T, [&](double s) {
            return eval_theta(model, s) - model.riskfree(s);
        });
        return shift + inner * std::exp(-A) / sw;
    }

    // int_t^T g(s) exp(-int_t^s k) ds, exact piece by piece.
    const auto bps = model.breakpoints();
    double acc = 0.0;
    double K = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double lo = std::max(t, bps[i]);
        const double hi = bps[i + 1];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi);
        const double g = eval_theta(model, mid) - model.riskfree(mid);
        const double k = form == PsiForm::VariationOfConstants ? rate_b(mid) : rate_a(mid);
        const double len = hi - lo;
        const double weight = k == 0.0 ? len : -std::expm1(-k * len) / k;
        acc += g * std::exp(-K) * weight;
        K += k * len;
    }
    return shift + acc / sw;
}

inline SolutionGrid solve_mean(const MarketModel& model, const EmbeddingParams& params,
                               const SolutionGrid& phi, const SolutionGrid& psi) {
    const GridSpec& spec = phi.spec();
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return cells[s.cell].rho - cells[s.cell].theta; },
        [&](const Stage& s) {
            const double f = detail::phi_at(phi, cells, params, s, false);
            const double g = detail::psi_at(phi, psi, cells, params, s, false);
            return -cells[s.cell].theta * detail::c_value(params, f, g);
        },
        params.x0, Direction::Forward, spec);
}

inline SolutionGrid solve_second_moment(const MarketModel& model, const EmbeddingParams& params,
                                        const SolutionGrid& phi, const SolutionGrid& psi) {
    const GridSpec& spec = phi.spec();
    const CellTable cells(model, spec);
    return integrate_scalar_linear(
        [&](const Stage& s) { return 2.0 * cells[s.cell].rho - cells[s.cell].theta; },
        [&](const Stage& s) {
            const double f = detail::phi_at(phi, cells, params, s, false);
            const double g = detail::psi_at(phi, psi, cells, params, s, false);
            const double c = detail::c_value(params, f, g);
            return cells[s.cell].theta * c * c;
        },
        params.x0 * params.x0, Direction::Forward, spec);
}

/// Every deterministic function for one (model, params) pair on one grid.
struct Solution {
    EmbeddingParams params;
    SolutionGrid phi, psi;   // maximum principle
    SolutionGrid P, Q, R;    // dynamic programming
    SolutionGrid mean, second_moment;

    [[nodiscard]] const GridSpec& spec() const { return phi.spec(); }
};

inline Solution solve_all(const MarketModel& model, const EmbeddingParams& params,
                          const GridSpec& spec) {
    params.check();
    Solution s;
    s.params = params;
    s.phi = solve_phi(model, params, spec);
    s.psi = solve_psi(model, params, s.phi);
    s.P = solve_P(model, params, spec);
    s.Q = solve_Q(model, params, s.P);
    s.R = solve_R(model, params, s.P, s.Q);
    s.mean = solve_mean(model, params, s.phi, s.psi);
    s.second_moment = solve_second_moment(model, params, s.phi, s.psi);
    return s;
}

}  // namespace mvjump
