#include <gtest/gtest.h>

#include "mvjump/market.hpp"
#include "oracles.hpp"

using namespace mvjump;

TEST(PiecewiseConstant, LeftClosedIntervals) {
    const PiecewiseConstantFn f({0.0, 0.5, 1.0}, {1.0, 2.0});
    EXPECT_EQ(f(0.0), 1.0);
    EXPECT_EQ(f(0.49), 1.0);
    EXPECT_EQ(f(0.5), 2.0);
    EXPECT_EQ(f(1.0), 2.0);
    EXPECT_THROW((void)f(1.0 + 1e-12), DomainError);
    EXPECT_THROW((void)f(-1e-12), DomainError);
}

TEST(PiecewiseConstant, RejectsMalformedInput) {
    EXPECT_THROW(PiecewiseConstantFn({0.0}, {}), DomainError);
    EXPECT_THROW(PiecewiseConstantFn({0.1, 1.0}, {1.0}), DomainError);
    EXPECT_THROW(PiecewiseConstantFn({0.0, 0.5, 0.5}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(PiecewiseConstantFn({0.0, 1.0}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(PiecewiseConstantFn({0.0, 1.0}, {std::nan("")}), DomainError);
}

TEST(Market, FixtureRates) {
    const auto m = oracle::fixture_market();
    EXPECT_NEAR(eval_lambda(m, 0.3), oracle::kLambda, 1e-16);
    EXPECT_NEAR(eval_theta(m, 0.3), oracle::kTheta, 1e-16);
    EXPECT_NEAR(eval_theta0(m, 0.3), 0.16, 1e-15);
    EXPECT_LT(eval_theta(m, 0.3), eval_theta0(m, 0.3));
}

TEST(Market, NoJumpsThetaEqualsTheta0) {
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.15));
    EXPECT_EQ(eval_theta(m, 0.7), eval_theta0(m, 0.7));
}

TEST(Market, ZeroVolatilityWithJumps) {
    const auto m = validate(constant_market(1.0, 0.06, 0.12, 0.0, {{2.0, 0.1}}));
    EXPECT_NEAR(eval_lambda(m, 0.5), 0.02, 1e-16);
    EXPECT_THROW(eval_theta0(m, 0.5), DegenerateVolatility);
}

TEST(Market, ValidateNamesTheViolation) {
    MarketModel m = constant_market(1.0, 0.06, 0.12, 0.15);
    m.drift = PiecewiseConstantFn({0.0, 0.5, 1.0}, {0.12, 0.05});
    try {
        validate(m);
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("mu(t) <= rho(t) at t=0.5"), std::string::npos);
    }
    EXPECT_THROW(validate(constant_market(1.0, 0.0, 0.12, 0.15)), ModelError);
    EXPECT_THROW(validate(constant_market(1.0, 0.06, 0.12, 0.0)), ModelError);
    EXPECT_THROW(validate(constant_market(1.0, 0.06, 0.12, 0.15, {{-1.0, 0.1}})), ModelError);
}

TEST(Market, BreakpointUnion) {
    MarketModel m = constant_market(1.0, 0.06, 0.12, 0.15, {{1.0, 0.1}});
    m.riskfree = PiecewiseConstantFn({0.0, 0.5, 1.0}, {0.05, 0.06});
    m.jumps[0].size = PiecewiseConstantFn({0.0, 0.25, 0.5, 1.0}, {0.1, 0.2, 0.3});
    EXPECT_EQ(m.breakpoints(), (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
}

TEST(Market, IntegratePiecewiseIsExact) {
    MarketModel m = constant_market(1.0, 0.06, 0.12, 0.15);
    m.riskfree = PiecewiseConstantFn({0.0, 0.3, 1.0}, {0.05, 0.07});
    validate(m);
    const double got = integrate_piecewise(m, 0.1, 0.8, [&](double s) { return m.riskfree(s); });
    EXPECT_NEAR(got, 0.2 * 0.05 + 0.5 * 0.07, 1e-16);
    EXPECT_NEAR(integrate_piecewise(m, 0.8, 0.1, [&](double s) { return m.riskfree(s); }), -got, 1e-16);
}
