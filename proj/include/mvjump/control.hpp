/**
 * @file control.hpp
 * @brief Optimal feedback laws, adjoint processes, the quadratic value
 *        function and the check that both solution routes agree.
 *
 * The optimal embedded control is
 *
 *     u(t, y) = (rho - mu) (F(t) y + G(t) - 1/sqrt(w)) / (F(t) Lambda(t))
 *
 * with (F, G) = (phi, psi) on the maximum-principle side and (P, Q) on the
 * dynamic-programming side. In wealth units v = u / sqrt(w) at
 * y = sqrt(w) (X - beta).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mvjump/market.hpp"
#include "mvjump/odes.hpp"

namespace mvjump {

enum class PolicySide { MP, DPP };

inline const char* to_string(PolicySide s) { return s == PolicySide::MP ? "MP" : "DPP"; }

/// Feedback law built from a (phi, psi) or (P, Q) pair.
struct FeedbackPolicy {
    MarketModel model;
    EmbeddingParams params;
    SolutionGrid first;   // phi or P
    SolutionGrid second;  // psi or Q
    PolicySide side = PolicySide::MP;

    static FeedbackPolicy from_mp(const MarketModel& model, const Solution& s) {
        return make(model, s.params, s.phi, s.psi, PolicySide::MP);
    }
    static FeedbackPolicy from_dpp(const MarketModel& model, const Solution& s) {
        return make(model, s.params, s.P, s.Q, PolicySide::DPP);
    }

    static FeedbackPolicy make(MarketModel model, EmbeddingParams params, SolutionGrid first,
                               SolutionGrid second, PolicySide side) {
        for (std::size_t k = 0; k < first.size(); ++k) {
            if (!(first[k] > 0.0)) throw DomainError("feedback policy needs phi/P > 0 on every node");
        }
        return {std::move(model), params, std::move(first), std::move(second), side};
    }
};

inline double feedback_u(const FeedbackPolicy& pol, double t, double y) {
    const MarketPoint m = market_point(pol.model, t);
    const double f = pol.first.at(t);
    const double g = pol.second.at(t);
    return (m.rho - m.mu) * (f * y + g - 1.0 / pol.params.sqrt_w()) / (f * m.lambda);
}

inline double feedback_v(const FeedbackPolicy& pol, double t, double wealth) {
    const MarketPoint m = market_point(pol.model, t);
    const double f = pol.first.at(t);
    const double g = pol.second.at(t);
    const double sw = pol.params.sqrt_w();
    return (m.rho - m.mu) * (f * sw * (wealth - pol.params.beta) + g - 1.0 / sw) /
           (sw * f * m.lambda);
}

/// Adjoint processes (q, p, r, R(., z_i)) at one state.
struct AdjointState {
    double q = 1.0;
    double p = 0.0;
    double r = 0.0;
    std::vector<double> Rk;  // one entry per jump mark
};

inline AdjointState adjoint(const FeedbackPolicy& pol, double t, double y_hat, double u_hat) {
    pol.model.check_time(t);
    AdjointState a;
    const double f = pol.first.at(t);
    const double g = pol.second.at(t);
    a.q = std::exp(-pol.params.gamma * t);
    a.p = (f * y_hat + g) * a.q;
    a.r = f * pol.model.vol(t) * u_hat * a.q;
    a.Rk.reserve(pol.model.jumps.size());
    for (const auto& j : pol.model.jumps) a.Rk.push_back(f * u_hat * j.size(t) * a.q);
    return a;
}

struct ValueEval {
    double V = 0.0;
    double Vy = 0.0;
    double Vyy = 0.0;
};

/// V(t, y) = P(t) y^2 / 2 + Q(t) y + R(t).
struct ValueFunction {
    MarketModel model;
    EmbeddingParams params;
    SolutionGrid P, Q, R;

    static ValueFunction from(const MarketModel& model, const Solution& s) {
        return {model, s.params, s.P, s.Q, s.R};
    }

    [[nodiscard]] FeedbackPolicy policy() const {
        return FeedbackPolicy::make(model, params, P, Q, PolicySide::DPP);
    }
};

inline ValueEval value(const ValueFunction& vf, double t, double y) {
    const double P = vf.P.at(t);
    const double Q = vf.Q.at(t);
    const double R = vf.R.at(t);
    return {0.5 * P * y * y + Q * y + R, P * y + Q, P};
}

/// The generalized Hamiltonian of the HJB equation evaluated with the
/// quadratic value function; the jump integral is a finite sum over marks.
inline double generalized_hamiltonian(const ValueFunction& vf, double t, double y, double u) {
    const MarketPoint m = market_point(vf.model, t);
    const double sw = vf.params.sqrt_w();
    const double beta = vf.params.beta;
    const ValueEval v = value(vf, t, y);

    double jump = 0.0;
    for (const auto& j : vf.model.jumps) {
        const double eta = j.size(t);
        const double shifted = value(vf, t, y + u * eta).V;
        jump += j.rate * (shifted - v.V - u * eta * v.Vy);
    }
    return -v.Vy * (y * m.rho + u * (m.mu - m.rho) + sw * beta * m.rho)
           - 0.5 * v.Vyy * u * u * m.sigma * m.sigma
           - jump
           + m.rho * (y / sw + beta) + (m.mu - m.rho) * u / sw
           + vf.params.gamma * v.V;
}

/// The same Hamiltonian after completing the square in u:
///
///     -P Lambda / 2 (u - u*)^2 + a2 y^2 + a1 y + a0
///
/// with u* the DPP feedback. The constant carries -sqrt(w) beta rho Q, which
/// is what expanding -V_y (y rho + sqrt(w) beta rho) gives.
inline double completed_square_hamiltonian(const ValueFunction& vf, double t, double y, double u) {
    const MarketPoint m = market_point(vf.model, t);
    const double sw = vf.params.sqrt_w();
    const double beta = vf.params.beta;
    const double gamma = vf.params.gamma;
    const double P = vf.P.at(t);
    const double Q = vf.Q.at(t);
    const double R = vf.R.at(t);
    const double excess2 = (m.rho - m.mu) * (m.rho - m.mu);
    const double gap = Q - 1.0 / sw;
    const double u_star = (m.rho - m.mu) * (P * y + gap) / (P * m.lambda);
    const double a2 = excess2 * P / (2.0 * m.lambda) + 0.5 * gamma * P - m.rho * P;
    const double a1 = excess2 * gap / m.lambda + gamma * Q - sw * beta * m.rho * P - Q * m.rho + m.rho / sw;
    const double a0 = excess2 * gap * gap / (2.0 * P * m.lambda) - Q * sw * beta * m.rho + m.rho * beta + gamma * R;
    const double d = u - u_star;
    return -0.5 * P * m.lambda * d * d + a2 * y * y + a1 * y + a0;
}

/// Maximum-principle Hamiltonian H(t, y, Y, u, p, q, r, R).
inline double mp_hamiltonian(const MarketModel& model, const EmbeddingParams& params, double t,
                             double y, double Y, double u, const AdjointState& adj) {
    const MarketPoint m = market_point(model, t);
    const double sw = params.sqrt_w();
    double jump = 0.0;
    for (std::size_t i = 0; i < model.jumps.size(); ++i) {
        jump += model.jumps[i].size(t) * adj.Rk[i] * model.jumps[i].rate;
    }
    return (m.rho * y + (m.mu - m.rho) * u + sw * params.beta * m.rho) * adj.p
           + m.sigma * u * adj.r + u * jump
           - adj.q * (m.rho * (y / sw + params.beta) + (m.mu - m.rho) * u / sw - params.gamma * Y);
}

/// dH/du with the adjoints held fixed; zero at the optimum.
inline double mp_hamiltonian_u_slope(const MarketModel& model, const EmbeddingParams& params,
                                     double t, const AdjointState& adj) {
    const MarketPoint m = market_point(model, t);
    double jump = 0.0;
    for (std::size_t i = 0; i < model.jumps.size(); ++i) {
        jump += model.jumps[i].size(t) * adj.Rk[i] * model.jumps[i].rate;
    }
    return (m.mu - m.rho) * adj.p + m.sigma * adj.r + jump -
           adj.q * (m.mu - m.rho) / params.sqrt_w();
}

struct PathState {
    double t = 0.0;
    double y = 0.0;
};

struct IdentityCheck {
    std::string name;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    double worst_t = 0.0;
    bool pass = true;
};

struct VerificationReport {
    std::vector<IdentityCheck> identities;
    // Audit only: max |dH/du| at the optimum over the sample, and the
    // largest |H| seen, for scale.
    double max_abs_h_slope = 0.0;
    double max_abs_h = 0.0;
    double tolerance = 1e-8;
    bool pass = true;
};

namespace detail {

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline void record(IdentityCheck& c, double mp, double dpp, double t) {
    const double abs_err = std::abs(mp - dpp);
    const double rel_err = relative_error(mp, dpp);
    c.max_abs_err = std::max(c.max_abs_err, abs_err);
    if (rel_err > c.max_rel_err) {
        c.max_rel_err = rel_err;
        c.worst_t = t;
    }
}

}  // namespace detail

/// Compares the MP adjoints with the value-function expressions
///
///     p = V_y(t, y) q
///     r = V_yy(t, y) sigma u q
///     R(t, z_i) = [V_y(t, y + u eta_i) - V_y(t, y)] q
///
/// over the sampled states. The MP side uses (phi, psi), the DPP side uses
/// (P, Q, R); each side computes its own optimal control.
inline VerificationReport verify_mp_dpp(const FeedbackPolicy& mp, const ValueFunction& vf,
                                        const std::vector<PathState>& states,
                                        double tolerance = 1e-8) {
    const FeedbackPolicy dpp = vf.policy();
    VerificationReport rep;
    rep.tolerance = tolerance;
    IdentityCheck cp{"p = V_y q"};
    IdentityCheck cr{"r = V_yy sigma u q"};
    IdentityCheck cR{"R(z) = [V_y(y + u eta) - V_y(y)] q"};

    for (const auto& st : states) {
        const double t = st.t;
        const double y = st.y;
        const double u_mp = feedback_u(mp, t, y);
        const double u_dpp = feedback_u(dpp, t, y);
        const AdjointState adj = adjoint(mp, t, y, u_mp);
        const ValueEval v = value(vf, t, y);
        const double q = std::exp(-vf.params.gamma * t);

        detail::record(cp, adj.p, v.Vy * q, t);
        detail::record(cr, adj.r, v.Vyy * vf.model.vol(t) * u_dpp * q, t);
        for (std::size_t i = 0; i < vf.model.jumps.size(); ++i) {
            const double eta = vf.model.jumps[i].size(t);
            const double rhs = (value(vf, t, y + u_dpp * eta).Vy - v.Vy) * q;
            detail::record(cR, adj.Rk[i], rhs, t);
        }

        const double slope = mp_hamiltonian_u_slope(vf.model, vf.params, t, adj);
        rep.max_abs_h_slope = std::max(rep.max_abs_h_slope, std::abs(slope));
        const double h = mp_hamiltonian(vf.model, vf.params, t, y, -v.V, u_mp, adj);
        rep.max_abs_h = std::max(rep.max_abs_h, std::abs(h));
    }

    for (auto* c : {&cp, &cr, &cR}) {
        c->pass = c->max_rel_err <= tolerance;
        rep.pass = rep.pass && c->pass;
        rep.identities.push_back(*c);
    }
    return rep;
}

}  // namespace mvjump
