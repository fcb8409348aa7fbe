#include <fasthz/analytic.hpp>
#include <fasthz/calibration.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace fasthz;

TEST(SolveThresholdRatio, InvertsRegularizedGamma) {
    for (double target : {1e-6, 0.035, 0.3, 0.9}) {
        const double t = solve_threshold_ratio([](double t) { return reg_gamma_lower(2, t); }, target);
        EXPECT_NEAR(t, boost::math::gamma_p_inv(2.0, target), 1e-12 * t);
    }
}

TEST(SolveThresholdRatio, RejectsUnbracketedTargets) {
    auto op = [](double t) { return reg_gamma_lower(1, t); };
    EXPECT_THROW(solve_threshold_ratio(op, 0.0), domain_error);
    EXPECT_THROW(solve_threshold_ratio(op, 1.0), domain_error);
    EXPECT_THROW(solve_threshold_ratio(op, 0.5, 1.0, 2.0), domain_error);
}

TEST(FitTwoPoint, RecoversSyntheticPair) {
    const double gbar = 0.4, x = 0.85;
    const auto fit = fit_two_point(1.0, x / gbar, 2.0, x * x / gbar);
    EXPECT_NEAR(fit.gamma_bar, gbar, 1e-14);
    EXPECT_NEAR(fit.envelope_threshold, x, 1e-14);
    EXPECT_NEAR(fit.ratio(3.0), x * x * x / gbar, 1e-14);
    EXPECT_NEAR(fit.gamma_th(4.0), std::pow(x, 4.0), 1e-15);
    EXPECT_THROW(fit_two_point(2.0, 1.0, 2.0, 3.0), domain_error);
    EXPECT_THROW(fit_two_point(1.0, -1.0, 2.0, 3.0), domain_error);
}

TEST(Calibration, PortsFiftyRayleighPair) {
    // mu = 1, W = 1, L = 50: outage 0.237 at alpha = 1 and 0.035 at alpha = 2.
    const auto p = AlphaMuParams::normalized(1.0, 1);
    const PortLayout layout(50, 1.0);
    auto op = [&](double t) { return op_fas(p, layout, 1.0, t); };
    const double t1 = solve_threshold_ratio(op, 0.237);
    const double t2 = solve_threshold_ratio(op, 0.035);
    EXPECT_NEAR(t1, 3.15036, 1e-4 * t1);
    EXPECT_NEAR(t2, 2.30699, 1e-4 * t2);

    const auto fit = fit_two_point(1.0, t1, 2.0, t2);
    OutageScenario s;
    s.mu = 1;
    s.num_ports = 50;
    s.size_coeff = 1.0;
    s.alpha = 2.0;
    s.gamma_bar = fit.gamma_bar;
    s.gamma_th = fit.envelope_threshold;
    s.alpha_scaled_threshold = true;
    EXPECT_NEAR(op_analytic(s), 0.035, 1e-9);
    s.alpha = 1.0;
    EXPECT_NEAR(op_analytic(s), 0.237, 1e-9);
}
