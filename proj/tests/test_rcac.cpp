#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "esctk/errors.hpp"
#include "esctk/rcac.hpp"

using esctk::RcacConfig;
using esctk::RcacController;
using esctk::retrospective_variable;

namespace {

RcacConfig general_config(int m, int p, int lc, int lf, double ru = 0.1, double p0 = 1.0) {
    RcacConfig cfg;
    cfg.structure.pid = false;
    cfg.structure.window = lc;
    cfg.input_dim = m;
    cfg.perf_dim = p;
    cfg.control_weight = ru;
    cfg.initial_covariance = p0;
    cfg.target_window = lf;
    return cfg;
}

RcacConfig pid_config(bool p, bool i, bool d, double ru = 0.05, double p0 = 0.9) {
    RcacConfig cfg;
    cfg.structure.pid = true;
    cfg.structure.use_p = p;
    cfg.structure.use_i = i;
    cfg.structure.use_d = d;
    cfg.input_dim = 1;
    cfg.perf_dim = 1;
    cfg.control_weight = ru;
    cfg.initial_covariance = p0;
    cfg.target_window = 1;
    return cfg;
}

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

// Batch minimizer of the cumulative retrospective cost: accumulates the
// regularized normal equations datum by datum and solves directly. This is
// the oracle the recursive update is checked against.
struct BatchMinimizer {
    Eigen::MatrixXd normal;
    Eigen::VectorXd rhs;

    BatchMinimizer(int ltheta, double p0)
        : normal(Eigen::MatrixXd::Identity(ltheta, ltheta) / p0),
          rhs(Eigen::VectorXd::Zero(ltheta)) {}

    void add(const Eigen::MatrixXd& n, const Eigen::VectorXd& z, const Eigen::VectorXd& u,
             const Eigen::MatrixXd& phi_stack, const Eigen::MatrixXd& phi, double ru) {
        const int p = static_cast<int>(z.size());
        const int m = static_cast<int>(phi.rows());
        Eigen::MatrixXd a(p + m, phi.cols());
        a.topRows(p) = n * phi_stack;
        a.bottomRows(m) = phi;
        Eigen::MatrixXd rbar = Eigen::MatrixXd::Zero(p + m, p + m);
        rbar.topLeftCorner(p, p).setIdentity();
        rbar.bottomRightCorner(m, m) = ru * Eigen::MatrixXd::Identity(m, m);
        Eigen::VectorXd y(p + m);
        y.head(p) = n * u - z;
        y.tail(m).setZero();
        normal += a.transpose() * rbar * a;
        rhs += a.transpose() * rbar * y;
    }

    Eigen::VectorXd solve() const { return normal.ldlt().solve(rhs); }
};

}  // namespace

TEST_CASE("theta dimension") {
    CHECK(general_config(2, 1, 5, 2).theta_dim() == 30);
    CHECK(general_config(1, 1, 2, 1).theta_dim() == 4);
    CHECK(pid_config(true, true, true).theta_dim() == 3);
    CHECK(pid_config(false, true, false).theta_dim() == 1);
}

TEST_CASE("config validation names the offending field") {
    RcacConfig cfg = general_config(1, 1, 2, 1);
    cfg.initial_covariance = -0.9;
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const esctk::ConfigError& err) {
        CHECK(err.field() == "p0");
    }

    RcacConfig pid = pid_config(true, false, false);
    pid.input_dim = 2;
    CHECK_THROWS_AS(pid.validate(), esctk::ConfigError);

    RcacConfig none = pid_config(false, false, false);
    CHECK_THROWS_AS(none.validate(), esctk::ConfigError);
}

TEST_CASE("regressor from zero history is zero") {
    RcacController ctrl(general_config(2, 1, 3, 2));
    CHECK(ctrl.build_regressor().norm() == 0.0);
    CHECK(ctrl.control_output().norm() == 0.0);
}

TEST_CASE("regressor expansion for m = p = 1, window 2") {
    RcacController ctrl(general_config(1, 1, 2, 1));
    // newest-first history ends up as [u_{k-1} u_{k-2} z_{k-1} z_{k-2}]
    ctrl.push_history(vec1(0.25), vec1(-0.5));  // becomes u_{k-2}, z_{k-2}
    ctrl.push_history(vec1(2.0), vec1(3.0));    // becomes u_{k-1}, z_{k-1}
    const Eigen::MatrixXd& phi = ctrl.build_regressor();
    REQUIRE(phi.rows() == 1);
    REQUIRE(phi.cols() == 4);
    CHECK(phi(0, 0) == 2.0);
    CHECK(phi(0, 1) == 0.25);
    CHECK(phi(0, 2) == 3.0);
    CHECK(phi(0, 3) == -0.5);
}

TEST_CASE("integrator-only regressor accumulates z") {
    RcacController ctrl(pid_config(false, true, false));
    for (int i = 0; i < 3; ++i) ctrl.push_history(vec1(0.0), vec1(1.0));
    const Eigen::MatrixXd& phi = ctrl.build_regressor();
    REQUIRE(phi.cols() == 1);
    CHECK(phi(0, 0) == 3.0);
}

TEST_CASE("control output is the regressor-coefficient product") {
    RcacController ctrl(general_config(1, 1, 2, 1));
    ctrl.push_history(vec1(0.0), vec1(0.0));
    ctrl.push_history(vec1(1.0), vec1(2.0));
    ctrl.build_regressor();  // [1 0 2 0]
    ctrl.set_theta((Eigen::VectorXd(4) << 1.0, 1.0, 0.5, 0.0).finished());
    CHECK(ctrl.control_output()[0] ==
          doctest::Approx((ctrl.regressor() * ctrl.theta())(0)).epsilon(1e-15));
    CHECK(ctrl.control_output()[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("full PID mask matches a hand-coded PID law") {
    const double kp = 0.8, ki = 0.15, kd = -0.3;
    RcacController ctrl(pid_config(true, true, true));
    ctrl.set_theta((Eigen::VectorXd(3) << kp, ki, kd).finished());

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    double zeta = 0.0, z1 = 0.0, z2 = 0.0;
    for (int k = 0; k < 40; ++k) {
        ctrl.build_regressor();
        const double by_controller = ctrl.control_output()[0];
        const double by_hand = kp * z1 + ki * zeta + kd * (z1 - z2);
        CHECK(by_controller == doctest::Approx(by_hand).epsilon(1e-14));

        const double z = dist(rng);
        ctrl.push_history(vec1(0.0), vec1(z));
        z2 = z1;
        z1 = z;
        zeta += z;
    }
}

TEST_CASE("zero-information datum leaves the state untouched") {
    RcacController ctrl(general_config(1, 1, 2, 1, 0.1, 2.0));
    const Eigen::VectorXd theta_before = ctrl.theta();
    const Eigen::MatrixXd cov_before = ctrl.covariance();
    ctrl.build_regressor();  // zero history -> zero phi
    const bool applied = ctrl.rls_update(Eigen::MatrixXd::Zero(1, 1), vec1(3.0),
                                         Eigen::VectorXd::Zero(1),
                                         Eigen::MatrixXd::Zero(1, 4));
    CHECK(applied);
    CHECK(ctrl.theta() == theta_before);
    CHECK(ctrl.covariance() == cov_before);
}

TEST_CASE("recursive update matches the batch minimizer") {
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const RcacConfig cfg = general_config(1, 1, 2, 1, 0.3, 1.4);
    RcacController ctrl(cfg);
    BatchMinimizer batch(cfg.theta_dim(), cfg.initial_covariance);

    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        ctrl.push_history(vec1(gauss(rng)), vec1(gauss(rng)));
        const Eigen::MatrixXd phi = ctrl.build_regressor();
        const Eigen::VectorXd stacked_u = ctrl.stacked_inputs();
        const Eigen::MatrixXd stacked_phi = ctrl.stacked_regressors();
        const Eigen::MatrixXd n = Eigen::MatrixXd::NullaryExpr(
            1, 1, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
        const Eigen::VectorXd z = vec1(gauss(rng));

        REQUIRE(ctrl.rls_update(n, z, stacked_u, stacked_phi));
        batch.add(n, z, stacked_u, stacked_phi, phi, cfg.control_weight);

        const Eigen::VectorXd direct = batch.solve();
        const double rel = (direct - ctrl.theta()).norm() /
                           std::max(1.0, direct.norm());
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("with no control weight a single datum is fit exactly") {
    // Large prior covariance and r_u = 0: the minimizer drives the
    // retrospective variable of the single datum to zero.
    RcacConfig cfg = general_config(1, 1, 2, 1, 0.0, 1e8);
    RcacController ctrl(cfg);
    ctrl.push_history(vec1(1.5), vec1(0.7));
    ctrl.push_history(vec1(-0.4), vec1(1.1));
    ctrl.build_regressor();
    const Eigen::VectorXd stacked_u = ctrl.stacked_inputs();
    const Eigen::MatrixXd stacked_phi = ctrl.stacked_regressors();
    const Eigen::MatrixXd n = Eigen::MatrixXd::Constant(1, 1, -1.0);
    const Eigen::VectorXd z = vec1(2.0);
    REQUIRE(ctrl.rls_update(n, z, stacked_u, stacked_phi));

    const Eigen::VectorXd zhat =
        retrospective_variable(n, z, stacked_u, stacked_phi, ctrl.theta());
    CHECK(std::abs(zhat[0]) < 1e-6);
}

TEST_CASE("retrospective variable") {
    // re-optimized inputs reproducing the applied inputs leave z
    const Eigen::MatrixXd n = Eigen::MatrixXd::Constant(1, 1, 0.8);
    const Eigen::MatrixXd phi_stack = Eigen::MatrixXd::Constant(1, 2, 1.0);
    const Eigen::VectorXd theta = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
    const Eigen::VectorXd u = vec1(2.0);  // phi_stack * theta == 2 == u
    CHECK(retrospective_variable(n, vec1(3.0), u, phi_stack, theta)[0] ==
          doctest::Approx(3.0).epsilon(1e-15));

    // zero target model passes z through
    CHECK(retrospective_variable(Eigen::MatrixXd::Zero(1, 2), vec1(3.0), u, phi_stack,
                                 theta)[0] == 3.0);

    // scalar arithmetic: 3 - 1*(2 - 1*1) = 2
    CHECK(retrospective_variable(Eigen::MatrixXd::Constant(1, 1, 1.0), vec1(3.0),
                                 vec1(2.0), Eigen::MatrixXd::Constant(1, 1, 1.0),
                                 vec1(1.0))[0] == 2.0);
}

TEST_CASE("covariance stays symmetric and contracts in the psd order") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const RcacConfig cfg = general_config(2, 1, 2, 2, 0.2, 1.0);
    RcacController ctrl(cfg);

    for (int k = 0; k < 60; ++k) {
        ctrl.push_history(Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) { return gauss(rng); }),
                          vec1(gauss(rng)));
        ctrl.build_regressor();
        const Eigen::MatrixXd before = ctrl.covariance();
        const Eigen::MatrixXd n = Eigen::MatrixXd::NullaryExpr(
            1, 4, [&](Eigen::Index, Eigen::Index) { return gauss(rng); });
        if (!ctrl.rls_update(n, vec1(gauss(rng)), ctrl.stacked_inputs(),
                             ctrl.stacked_regressors()))
            continue;
        const Eigen::MatrixXd& after = ctrl.covariance();
        CHECK((after - after.transpose()).norm() <= 1e-12);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(before - after);
        CHECK(eigs.eigenvalues()(0) >= -1e-12);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pd(after);
        CHECK(pd.eigenvalues()(0) > 1e-12 * pd.eigenvalues().cwiseAbs().maxCoeff());
    }
}
