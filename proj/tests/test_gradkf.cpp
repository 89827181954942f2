#include <doctest.h>

#include <cmath>
#include <random>

#include "esctk/errors.hpp"
#include "esctk/gradkf.hpp"

using esctk::GradientKf;
using esctk::GradKfConfig;

namespace {

GradKfConfig siso_config(double q, double r, double p0, int lag) {
    GradKfConfig cfg;
    cfg.input_dim = 1;
    cfg.cost_dim = 1;
    cfg.process_noise = {q};
    cfg.measurement_noise = {r};
    cfg.initial_covariance = {p0};
    cfg.lags = {lag};
    return cfg;
}

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("lag validation") {
    GradKfConfig cfg = siso_config(0.1, 1.0, 1.0, 3);
    cfg.lags = {0};
    CHECK_THROWS_AS(cfg.validate(), esctk::ConfigError);
    cfg.lags = {3, 2};
    CHECK_THROWS_AS(cfg.validate(), esctk::ConfigError);
    cfg.lags = {2};
    CHECK_THROWS_AS(cfg.validate(), esctk::ConfigError);  // one lag per input
    cfg.input_dim = 1;
    cfg.lags = {2};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zero input history keeps the gradient estimate at zero") {
    GradientKf kf(siso_config(0.1, 10.0, 1e-3, 3));
    // Nonzero cost with all-zero inputs is attributed entirely to the bias.
    const Eigen::MatrixXd g = kf.step(vec1(0.7), vec1(0.0));
    CHECK(std::abs(g(0, 0)) < 1e-15);

    GradientKf quiet(siso_config(0.1, 10.0, 1e-3, 3));
    for (int k = 0; k < 20; ++k)
        CHECK(quiet.step(vec1(0.0), vec1(0.0)).norm() == 0.0);
    CHECK(quiet.state(0).norm() == 0.0);
}

TEST_CASE("covariance initialization, symmetry and the large-r limit") {
    GradientKf kf(siso_config(0.1, 1e12, 1e-3, 3));
    const Eigen::MatrixXd expected_init = 1e-3 * Eigen::MatrixXd::Identity(2, 2);
    CHECK((kf.covariance(0) - expected_init).norm() == 0.0);

    kf.step(vec1(1.0), vec1(0.5));
    // With an enormous measurement weight the gain is negligible and the
    // covariance only picks up the process term.
    const Eigen::MatrixXd expected = (1e-3 + 0.1) * Eigen::MatrixXd::Identity(2, 2);
    CHECK((kf.covariance(0) - expected).norm() < 1e-9);
    CHECK((kf.covariance(0) - kf.covariance(0).transpose()).norm() <= 1e-12);

    CHECK_THROWS_AS(kf.covariance(1), esctk::ConfigError);
}

TEST_CASE("affine cost is identified exactly") {
    // J = 3u + 2 matches the measurement model, so the filter's fixed point
    // is the true pair (gradient, bias).
    GradientKf kf(siso_config(0.1, 1.0, 1.0, 3));
    Eigen::VectorXd state;
    int converged_at = -1;
    for (int k = 0; k < 200; ++k) {
        const double u = std::sin(0.4 * k) + 0.3 * std::cos(1.3 * k);
        kf.step(vec1(3.0 * u + 2.0), vec1(u));
        state = kf.state(0);
        if (converged_at < 0 && std::abs(state[0] - 3.0) < 1e-3 &&
            std::abs(state[1] - 2.0) < 1e-3)
            converged_at = k;
    }
    REQUIRE(converged_at >= 0);
    CHECK(std::abs(state[0] - 3.0) < 1e-3);
    CHECK(std::abs(state[1] - 2.0) < 1e-3);
}

TEST_CASE("tracks the gradient of a swept quadratic") {
    // Slow sweep of u through [0, 2] on J = (u - 1)^2; the estimate should
    // track the analytic gradient 2(u - 1) within 5% of its range (0.2).
    GradientKf kf(siso_config(0.1, 10.0, 1e-3, 3));
    const int steps = 400;
    double u_prev = 0.0;
    double worst_after_burn_in = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double u = 2.0 * k / (steps - 1);
        const double cost = (u_prev - 1.0) * (u_prev - 1.0);
        const Eigen::MatrixXd g = kf.step(vec1(cost), vec1(u_prev));
        if (k >= steps / 4)
            worst_after_burn_in =
                std::max(worst_after_burn_in, std::abs(g(0, 0) - 2.0 * (u_prev - 1.0)));
        u_prev = u;
    }
    CHECK(worst_after_burn_in < 0.2);
}

TEST_CASE("channels are independent") {
    GradKfConfig cfg;
    cfg.input_dim = 1;
    cfg.cost_dim = 2;
    cfg.process_noise = {0.1, 0.1};
    cfg.measurement_noise = {1.0, 1.0};
    cfg.initial_covariance = {0.5, 0.5};
    cfg.lags = {2};

    GradientKf a(cfg), b(cfg);
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double u = gauss(rng);
        const double shared = 2.0 * u + 0.5;
        a.step((Eigen::VectorXd(2) << shared, gauss(rng)).finished(), vec1(u));
        b.step((Eigen::VectorXd(2) << shared, gauss(rng)).finished(), vec1(u));
    }
    CHECK(a.state(0) == b.state(0));  // channel 0 saw identical data
    CHECK(a.covariance(0) == b.covariance(0));
    CHECK(a.state(1) != b.state(1));
}

TEST_CASE("covariance trace contracts under repeated identical measurements") {
    GradientKf kf(siso_config(1e-12, 1.0, 1.0, 2));
    double previous = kf.covariance(0).trace();
    for (int k = 0; k < 30; ++k) {
        kf.step(vec1(1.7), vec1(0.8));
        const double current = kf.covariance(0).trace();
        CHECK(current < previous + 1e-12);
        previous = current;
    }
}
