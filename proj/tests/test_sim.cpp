#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mvjump/rng.hpp"
#include "mvjump/sim.hpp"
#include "oracles.hpp"

using namespace mvjump;

TEST(Philox, KnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::apply({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, UniformsInOpenInterval) {
    EXPECT_GT(to_open_unit(0, 0), 0.0);
    EXPECT_LT(to_open_unit(0xffffffff, 0xffffffff), 1.0);
    EXPECT_GT(1.0 - to_open_unit(0xffffffff, 0xffffffff), 0.0);
}

TEST(Rng, NormalMoments) {
    const PathStream s(7, 3);
    std::vector<double> z(200000);
    for (std::uint32_t i = 0; i < z.size(); ++i) z[i] = s.normal(i);
    const auto st = sample_stats(z);
    EXPECT_NEAR(st.mean, 0.0, 4 * st.se_mean);
    EXPECT_NEAR(st.variance, 1.0, 4 * st.se_var);
}

TEST(Rng, StreamsDiffer) {
    EXPECT_NE(PathStream(1, 0).normal(0), PathStream(1, 1).normal(0));
    EXPECT_NE(PathStream(1, 0).normal(0), PathStream(2, 0).normal(0));
    EXPECT_NE(PathStream(1, 0).uniform(0, 0), PathStream(1, 0).uniform(0, 1));
    EXPECT_EQ(PathStream(1, 5).uniform(9, 2), PathStream(1, 5).uniform(9, 2));
}

TEST(Rng, PoissonInversion) {
    EXPECT_EQ(poisson_inverse(0.1, 0.5, std::exp(-0.5)), 0u);
    EXPECT_EQ(poisson_inverse(0.7, 0.5, std::exp(-0.5)), 1u);
    const PathStream s(3, 0);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += poisson_inverse(s.uniform(static_cast<std::uint32_t>(i), 0), 2.5, std::exp(-2.5));
    EXPECT_NEAR(sum / n, 2.5, 4 * std::sqrt(2.5 / n));
}

TEST(Stats, PairwiseSumIsOrderFixed) {
    std::vector<double> x(1001);
    std::iota(x.begin(), x.end(), 0.0);
    EXPECT_EQ(pairwise_sum(x), 500500.0);
    const auto st = sample_stats(std::vector<double>{1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(st.mean, 2.5);
    EXPECT_DOUBLE_EQ(st.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(st.se_mean, std::sqrt(5.0 / 3.0 / 4.0));
}

TEST(SimConfigTest, StepsMustDivideHorizon) {
    SimConfig c;
    c.dt = 1e-3;
    EXPECT_EQ(c.steps(1.0), 1000u);
    c.dt = 0.3;
    EXPECT_THROW((void)c.steps(1.0), DomainError);
    c.dt = 0.0;
    EXPECT_THROW((void)c.steps(1.0), DomainError);
}

TEST(Simulate, ZeroExposureGrowsAtRiskFreeRate) {
    const auto m = oracle::fixture_market();
    SimConfig c;
    c.n_paths = 3;
    c.dt = 1e-5;
    const auto ens = simulate(m, oracle::fixture_params(), [](std::size_t, double, double) { return 0.0; }, c);
    for (double x : ens.terminal_wealth) EXPECT_NEAR(x, std::exp(0.06), 1e-6);
    EXPECT_EQ(ens.wealth.variance, 0.0);
}

TEST(Simulate, ConstantControlMean) {
    // v = c: E X' = rho E X + (mu - rho) c.
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.2));
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1e-2;
    const double c = 0.8;
    const auto ens = simulate(m, oracle::fixture_params(), [c](std::size_t, double, double) { return c; }, cfg);
    const double expect = std::exp(0.06) + 0.06 * c * (std::exp(0.06) - 1.0) / 0.06;
    EXPECT_NEAR(ens.wealth.mean, expect, 3 * ens.wealth.se_mean);
}

TEST(Simulate, CompensatedJumpsHaveZeroMean) {
    // Bypasses validation on purpose: rho = mu = 0, sigma = 0.
    const MarketModel m = constant_market(1.0, 0.0, 0.0, 0.0, {{3.0, 0.2}, {1.0, -0.3}});
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1e-2;
    const auto ens = simulate(m, oracle::fixture_params(), [](std::size_t, double, double) { return 1.0; }, cfg);
    EXPECT_NEAR(ens.wealth.mean, 1.0, 3 * ens.wealth.se_mean);
    EXPECT_GT(ens.wealth.variance, 0.0);
}

TEST(Simulate, IndependentOfWorkerCount) {
    const auto m = oracle::fixture_market();
    const auto s = solve_all(m, oracle::fixture_params(), make_grid_spec(m, 1000));
    const auto pol = FeedbackPolicy::from_mp(m, s);
    SimConfig cfg;
    cfg.n_paths = 999;
    cfg.dt = 1e-2;
    cfg.workers = 1;
    const auto a = simulate(m, pol, cfg);
    cfg.workers = 7;
    const auto b = simulate(m, pol, cfg);
    EXPECT_EQ(a.terminal_wealth, b.terminal_wealth);
    EXPECT_EQ(a.running_reward, b.running_reward);
    EXPECT_EQ(a.wealth.mean, b.wealth.mean);
    EXPECT_EQ(a.wealth.se_var, b.wealth.se_var);
}

TEST(Simulate, SinglePathMatchesEnsemble) {
    const auto m = oracle::fixture_market();
    const auto p = oracle::fixture_params();
    const auto s = solve_all(m, p, make_grid_spec(m, 1000));
    const auto pol = FeedbackPolicy::from_mp(m, s);
    SimConfig cfg;
    cfg.n_paths = 10;
    cfg.dt = 1e-2;
    const TabulatedPolicy tab(pol, cfg);
    const auto ens = simulate(m, p, tab, cfg);
    const auto rec = simulate_path(m, p, tab, cfg, 6);
    EXPECT_EQ(rec.wealth.back(), ens.terminal_wealth[6]);
    EXPECT_EQ(rec.times.size(), 101u);
    // Tabulated control equals the direct feedback law.
    EXPECT_NEAR(tab(50, 0.5, 1.1), feedback_v(pol, 0.5, 1.1), 1e-14);
}

TEST(Simulate, AntitheticPairsMirror) {
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.2));
    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.dt = 0.5;
    cfg.antithetic = true;
    const auto ens = simulate(m, oracle::fixture_params(), [](std::size_t, double, double) { return 1.0; }, cfg);
    // Linear dynamics with constant control: mirrored noise averages to the noiseless path.
    const double mid = 0.5 * (ens.terminal_wealth[0] + ens.terminal_wealth[1]);
    const auto flat = simulate(constant_market(1.0, 0.06, 0.12, 0.0), oracle::fixture_params(),
                               [](std::size_t, double, double) { return 1.0; }, cfg);
    EXPECT_NEAR(mid, flat.terminal_wealth[0], 1e-12);
}

TEST(Utility, ShortHorizonLimit) {
    // One tiny step, no control, gamma = 0: Y0 -> -y0^2 / 2 = -0.125.
    const auto m = validate(constant_market(1e-6, 0.06, 0.12, 0.15));
    const EmbeddingParams p{1.0, 0.5, 0.0, 1.0};
    SimConfig cfg;
    cfg.n_paths = 2;
    cfg.dt = 1e-6;
    const auto ens = simulate(m, p, [](std::size_t, double, double) { return 0.0; }, cfg);
    EXPECT_NEAR(estimate_Y0(m, p, ens).value, -0.125, 1e-6);
}

TEST(Utility, MatchesValueFunction) {
    const auto m = oracle::fixture_market();
    const auto p = oracle::fixture_params();
    const auto s = solve_all(m, p, make_grid_spec(m, 10000));
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 2e-3;
    const auto ens = simulate(m, FeedbackPolicy::from_mp(m, s), cfg);
    const auto y = estimate_Y0(m, p, ens);
    EXPECT_NEAR(y.value, -oracle::kV0, 3 * y.se);
    // Cost is -Y0, i.e. +V0.
    EXPECT_NEAR(-y.value, oracle::kV0, 3 * y.se);
}

TEST(Perturbation, ZeroRowIsExact) {
    const auto m = oracle::fixture_market();
    const auto s = solve_all(m, oracle::fixture_params(), make_grid_spec(m, 2000));
    SimConfig cfg;
    cfg.n_paths = 5000;
    cfg.dt = 1e-2;
    const auto rep = perturbation_optimality_check(m, FeedbackPolicy::from_mp(m, s), cfg, {-0.2, 0.2});
    ASSERT_EQ(rep.rows.size(), 3u);
    EXPECT_EQ(rep.rows[1].eps, 0.0);
    EXPECT_EQ(rep.rows[1].diff, 0.0);
    EXPECT_TRUE(rep.pass);
    EXPECT_GT(rep.rows[0].diff, 0.0);  // cost increases
    EXPECT_GT(rep.rows[2].diff, 0.0);
}
