#include <gtest/gtest.h>

#include <cmath>

#include "mvjump/frontier.hpp"
#include "mvjump/sim.hpp"
#include "oracles.hpp"

using namespace mvjump;

TEST(Frontier, ResolveBeta) {
    const auto m = oracle::fixture_market();
    const auto spec = make_grid_spec(m, 10000);
    const auto br = resolve_beta(m, 1.0, oracle::kGamma, oracle::kX0, spec);
    EXPECT_NEAR(br.beta, oracle::kBetaResolved, 1e-10);
    EXPECT_NEAR(br.mean_T, oracle::kMeanResolved, 1e-10);
    EXPECT_LE(br.residual, 1e-9);
}

TEST(Frontier, FixedPointIterationAgrees) {
    const auto m = oracle::fixture_market();
    const auto spec = make_grid_spec(m, 2000);
    const auto br = resolve_beta(m, 1.0, oracle::kGamma, oracle::kX0, spec);
    ASSERT_LT(std::abs(br.slope), 1.0);
    EmbeddingParams p{1.0, oracle::kX0, oracle::kGamma, oracle::kX0};
    const auto phi = solve_phi(m, p, spec);
    for (int i = 0; i < 100; ++i) p.beta = 0.5 + terminal_mean(m, p, phi);
    EXPECT_NEAR(p.beta, br.beta, 1e-8);
}

TEST(Frontier, HalfOverTwoWShrinks) {
    const auto m = oracle::fixture_market();
    const auto spec = make_grid_spec(m, 2000);
    double prev = 1e300;
    for (double w : {0.5, 1.0, 2.0, 4.0}) {
        const auto br = resolve_beta(m, w, oracle::kGamma, oracle::kX0, spec);
        const double term = br.beta - br.mean_T;
        EXPECT_NEAR(term, 0.5 / w, 1e-9);
        EXPECT_LT(term, prev);
        prev = term;
    }
}

TEST(Frontier, VarianceCurveStartsAtZero) {
    const auto m = oracle::fixture_market();
    const auto s = solve_all(m, oracle::fixture_params(), make_grid_spec(m, 10000));
    const auto var = variance_curve(s.mean, s.second_moment);
    EXPECT_NEAR(var.front(), 0.0, 1e-15);
    EXPECT_NEAR(var.back(), oracle::kVarT, 1e-12);
    const auto rec = recursive_frontier_curve(m, s);
    for (std::size_t k = 0; k < var.size(); ++k) ASSERT_NEAR(rec[k], var[k], 1e-9);
    EXPECT_NEAR(recursive_frontier_variance(m, s, 0.0), 0.0, 1e-15);
}

TEST(Frontier, RecursiveFormOnPiecewiseModel) {
    MarketModel m = constant_market(1.0, 0.06, 0.12, 0.15, {{2.0, 0.1}, {0.5, -0.2}});
    m.drift = PiecewiseConstantFn({0.0, 0.25, 1.0}, {0.12, 0.10});
    m.riskfree = PiecewiseConstantFn({0.0, 0.5, 1.0}, {0.05, 0.06});
    validate(m);
    const auto s = solve_all(m, oracle::fixture_params(), make_grid_spec(m, 10000));
    const auto var = variance_curve(s.mean, s.second_moment);
    const auto rec = recursive_frontier_curve(m, s);
    for (std::size_t k = 0; k < var.size(); ++k) ASSERT_NEAR(rec[k], var[k], 1e-9);
}

TEST(Frontier, NegativeVarianceRaises) {
    const GridSpec g{0.0, 1.0, 1};
    EXPECT_THROW(variance_curve(SolutionGrid(g, {1.0, 1.0}), SolutionGrid(g, {1.0, 0.9})), NegativeVariance);
    EXPECT_EQ(variance_curve(SolutionGrid(g, {1.0, 1.0}), SolutionGrid(g, {1.0, 1.0 - 1e-13})).back(), 0.0);
}

TEST(StaticFrontier, ZhouLiHandValue) {
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.15));
    EXPECT_NEAR(zhou_li_variance(m, 1.2, 1.0), oracle::kZhouLiAt12, 1e-14);
}

TEST(StaticFrontier, VertexAndSymmetry) {
    const auto m = oracle::fixture_market();
    const double vertex = std::exp(0.06);
    EXPECT_EQ(zhou_li_variance(m, vertex, 1.0), 0.0);
    EXPECT_EQ(jump_frontier_variance(m, vertex, 1.0), 0.0);
    EXPECT_NEAR(zhou_li_variance(m, vertex + 0.2, 1.0), zhou_li_variance(m, vertex - 0.2, 1.0), 1e-15);
}

TEST(StaticFrontier, JumpsRaiseVariance) {
    const auto m = oracle::fixture_market();
    for (double mean = 0.8; mean < 1.6; mean += 0.05) {
        if (std::abs(mean - std::exp(0.06)) < 1e-9) continue;
        EXPECT_GT(jump_frontier_variance(m, mean, 1.0), zhou_li_variance(m, mean, 1.0));
    }
    // Three-point convexity.
    const double a = jump_frontier_variance(m, 1.1, 1.0);
    const double b = jump_frontier_variance(m, 1.2, 1.0);
    const double c = jump_frontier_variance(m, 1.3, 1.0);
    EXPECT_GT(a + c, 2 * b);
}

TEST(StaticFrontier, ZeroVolatilityRejected) {
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.0, {{2.0, 0.1}}));
    EXPECT_THROW(zhou_li_variance(m, 1.2, 1.0), DegenerateVolatility);
    EXPECT_GT(jump_frontier_variance(m, 1.2, 1.0), 0.0);
}

TEST(Sweep, PointsAreConsistent) {
    const auto m = oracle::fixture_market();
    const auto ws = log_spaced(0.1, 10.0, 32);
    ASSERT_EQ(ws.size(), 32u);
    EXPECT_DOUBLE_EQ(ws.front(), 0.1);
    EXPECT_EQ(ws.back(), 10.0);
    const auto pts = sweep_frontier(m, oracle::kGamma, oracle::kX0, ws, make_grid_spec(m, 2000));
    ASSERT_EQ(pts.size(), ws.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_TRUE(pts[i].ok()) << pts[i].status;
        EXPECT_EQ(pts[i].w, ws[i]);
        EXPECT_LE(pts[i].beta_residual, 1e-9);
        EXPECT_NEAR(pts[i].lambda_embed, 1.0 + 2.0 * pts[i].w * pts[i].mean_T, 1e-12);
        EXPECT_GE(pts[i].var_T, 0.0);
    }
    // Larger weight on variance: lower mean and lower variance.
    EXPECT_GT(pts.front().mean_T, pts.back().mean_T);
    EXPECT_GT(pts.front().var_T, pts.back().var_T);
}

TEST(Sweep, SpotCheckAgainstMonteCarlo) {
    const auto m = oracle::fixture_market();
    const auto spec = make_grid_spec(m, 2000);
    const auto pts = sweep_frontier(m, oracle::kGamma, oracle::kX0, {0.3, 1.0, 5.0}, spec);
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 2e-3;
    cfg.seed = 11;
    for (const auto& pt : pts) {
        const EmbeddingParams p{pt.w, pt.beta, oracle::kGamma, oracle::kX0};
        const auto ens = simulate(m, FeedbackPolicy::from_mp(m, solve_all(m, p, spec)), cfg);
        EXPECT_LE(std::abs(ens.wealth.mean - pt.mean_T), 3 * ens.wealth.se_mean) << pt.w;
        EXPECT_LE(std::abs(ens.wealth.variance - pt.var_T), 3 * ens.wealth.se_var) << pt.w;
    }
}
