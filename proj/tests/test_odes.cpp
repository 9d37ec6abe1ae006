#include <gtest/gtest.h>

#include <cmath>

#include "mvjump/frontier.hpp"
#include "mvjump/odes.hpp"
#include "oracles.hpp"

using namespace mvjump;

namespace {

struct Fixture : ::testing::Test {
    MarketModel m = oracle::fixture_market();
    EmbeddingParams p = oracle::fixture_params();
    GridSpec spec = make_grid_spec(m, 10000);
    Solution s = solve_all(m, p, spec);
};

}  // namespace

TEST_F(Fixture, TerminalConditions) {
    EXPECT_EQ(s.phi.back(), 1.0);
    EXPECT_EQ(s.psi.back(), 0.0);
    EXPECT_EQ(s.P.back(), 1.0);
    EXPECT_EQ(s.Q.back(), 0.0);
    EXPECT_EQ(s.R.back(), 0.0);
    EXPECT_EQ(s.mean.front(), 1.0);
    EXPECT_EQ(s.second_moment.front(), 1.0);
}

TEST_F(Fixture, FrozenValuesAtZero) {
    EXPECT_NEAR(s.phi[0], oracle::kPhi0, 1e-12);
    EXPECT_NEAR(s.psi[0], oracle::kPsi0, 1e-12);
    EXPECT_NEAR(s.Q[0], oracle::kPsi0, 1e-12);
    EXPECT_NEAR(s.R[0], oracle::kR0, 1e-12);
    EXPECT_NEAR(s.mean.back(), oracle::kMeanT, 1e-12);
    EXPECT_NEAR(variance_curve(s.mean, s.second_moment).back(), oracle::kVarT, 1e-12);
}

TEST_F(Fixture, PhiAgainstIntegralOracle) {
    const auto o = oracle::fixture_oracle();
    for (std::size_t k = 0; k < s.phi.size(); k += 500) {
        const double t = spec.node(k);
        EXPECT_NEAR(s.phi[k], o.phi(t), 1e-12) << t;
        EXPECT_NEAR(closed_form_phi(m, p, t), o.phi(t), 1e-14) << t;
        EXPECT_NEAR(s.psi[k], o.psi(t), 1e-11) << t;
        EXPECT_NEAR(closed_form_psi(m, p, t), o.psi(t), 1e-11) << t;
    }
}

TEST_F(Fixture, MpAndDppAgree) {
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
        ASSERT_NEAR(s.phi[k], s.P[k], 1e-10);
        ASSERT_NEAR(s.psi[k], s.Q[k], 1e-10);
    }
}

TEST_F(Fixture, PhiIsPositive) {
    for (std::size_t k = 0; k < s.phi.size(); ++k) ASSERT_GT(s.phi[k], 0.0);
}

TEST_F(Fixture, CFromClosedForms) {
    const double a = 1.0 / oracle::kPhi0;
    EXPECT_NEAR(eval_a(m, p, 0.0), a, 1e-12);
    EXPECT_NEAR(eval_C(m, p, s.psi, 0.0), -0.5 + a * oracle::kPsi0 - a, 1e-11);
}

TEST_F(Fixture, AlternativePsiKernelsDifferFromOde) {
    const double voc = closed_form_psi(m, p, 0.0, PsiForm::VariationOfConstants);
    EXPECT_GT(std::abs(closed_form_psi(m, p, 0.0, PsiForm::TerminalInner) - voc), 1e-4);
    EXPECT_GT(std::abs(closed_form_psi(m, p, 0.0, PsiForm::RunningInner) - voc), 1e-4);
}

TEST_F(Fixture, MeanClosedFormKernel) {
    EXPECT_NEAR(mean_closed_form(m, s, spec.n, true), oracle::kMeanT, 1e-8);
    EXPECT_GT(std::abs(mean_closed_form(m, s, spec.n, false) - oracle::kMeanT), 1e-4);
}

TEST_F(Fixture, RVariantsCoincideOnlyInSquareAtUnitWeight) {
    const auto fix = solve_R(m, p, s.P, s.Q, RVariant::PlusCross);
    const auto unit = solve_R(m, p, s.P, s.Q, RVariant::UnitShift);
    for (std::size_t k = 0; k < fix.size(); ++k) ASSERT_EQ(fix[k], unit[k]);
    EXPECT_GT(std::abs(fix[0] - s.R[0]), 1e-3);
}

TEST(Odes, RequiresPositiveP) {
    const auto m = oracle::fixture_market();
    const auto p = oracle::fixture_params();
    const GridSpec g{0.0, 1.0, 10};
    const SolutionGrid bad(g, std::vector<double>(11, 0.0));
    EXPECT_THROW(solve_R(m, p, bad, bad), DivisionByZero);
}

TEST(Odes, OrderOfConvergence) {
    const auto m = oracle::fixture_market();
    auto p = oracle::fixture_params();
    p.gamma += 20.0;
    const auto o = oracle::fixture_oracle(p.gamma);
    std::vector<double> err;
    for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
        const auto phi = solve_phi(m, p, GridSpec{0.0, 1.0, n});
        err.push_back(std::abs(phi[0] - o.phi(0.0)) / o.phi(0.0));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) EXPECT_NEAR(std::log2(err[i] / err[i + 1]), 4.0, 0.5);
}

TEST(Odes, PiecewiseCoefficientsMatchClosedForm) {
    MarketModel m = constant_market(1.0, 0.06, 0.12, 0.15, {{2.0, 0.1}});
    m.drift = PiecewiseConstantFn({0.0, 0.4, 1.0}, {0.12, 0.09});
    m.vol = PiecewiseConstantFn({0.0, 0.7, 1.0}, {0.15, 0.25});
    validate(m);
    const auto p = oracle::fixture_params();
    const auto spec = make_grid_spec(m, 10000);
    const auto s = solve_all(m, p, spec);
    for (std::size_t k = 0; k < s.phi.size(); k += 250) {
        EXPECT_NEAR(s.phi[k], closed_form_phi(m, p, spec.node(k)), 1e-10);
        EXPECT_NEAR(s.psi[k], closed_form_psi(m, p, spec.node(k)), 1e-10);
    }
}
