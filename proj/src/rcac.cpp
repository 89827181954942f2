#include "esctk/rcac.hpp"

#include <Eigen/Cholesky>

#include "esctk/errors.hpp"

namespace esctk {

namespace {

int pid_terms(const RcacStructure& s) {
    return (s.use_p ? 1 : 0) + (s.use_i ? 1 : 0) + (s.use_d ? 1 : 0);
}

}  // namespace

int RcacConfig::theta_dim() const {
    if (structure.pid) return pid_terms(structure);
    return structure.window * input_dim * (input_dim + perf_dim);
}

void RcacConfig::validate() const {
    if (input_dim < 1) throw ConfigError("m", "input dimension must be positive");
    if (perf_dim < 1) throw ConfigError("p", "performance dimension must be positive");
    if (!(initial_covariance > 0.0)) throw ConfigError("p0", "must be positive");
    if (control_weight < 0.0) throw ConfigError("r_u", "must be nonnegative");
    if (target_window < 1) throw ConfigError("l_f", "must be positive");
    if (structure.pid) {
        if (input_dim != 1 || perf_dim != 1)
            throw ConfigError("structure", "PID structure requires m = p = 1");
        if (pid_terms(structure) == 0)
            throw ConfigError("structure", "PID mask must enable at least one term");
    } else if (structure.window < 1) {
        throw ConfigError("l_c", "controller window must be positive");
    }
}

Eigen::VectorXd retrospective_variable(const Eigen::MatrixXd& target_model,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& stacked_inputs,
                                       const Eigen::MatrixXd& stacked_regressors,
                                       const Eigen::VectorXd& theta_hat) {
    return z - target_model * (stacked_inputs - stacked_regressors * theta_hat);
}

RcacController::RcacController(const RcacConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int ltheta = cfg_.theta_dim();
    theta_ = Eigen::VectorXd::Zero(ltheta);
    cov_ = cfg_.initial_covariance * Eigen::MatrixXd::Identity(ltheta, ltheta);
    phi_ = Eigen::MatrixXd::Zero(cfg_.input_dim, ltheta);
    const int history = cfg_.structure.pid ? 2 : cfg_.structure.window;
    const int depth = std::max(history, cfg_.target_window) + 1;
    for (int i = 0; i < depth; ++i) {
        u_hist_.emplace_back(Eigen::VectorXd::Zero(cfg_.input_dim));
        z_hist_.emplace_back(Eigen::VectorXd::Zero(cfg_.perf_dim));
        phi_hist_.emplace_back(Eigen::MatrixXd::Zero(cfg_.input_dim, ltheta));
    }
}

const Eigen::MatrixXd& RcacController::build_regressor() {
    const int m = cfg_.input_dim;
    if (cfg_.structure.pid) {
        const double z1 = z_hist_[0][0];
        const double z2 = z_hist_[1][0];
        int col = 0;
        if (cfg_.structure.use_p) phi_(0, col++) = z1;
        if (cfg_.structure.use_i) phi_(0, col++) = zeta_;
        if (cfg_.structure.use_d) phi_(0, col++) = z1 - z2;
        return phi_;
    }
    // [u_{k-1}^T ... u_{k-l_c}^T  z_{k-1}^T ... z_{k-l_c}^T] (x) I_m
    const int lc = cfg_.structure.window;
    const int p = cfg_.perf_dim;
    Eigen::VectorXd row(lc * (m + p));
    for (int i = 0; i < lc; ++i) row.segment(i * m, m) = u_hist_[i];
    for (int i = 0; i < lc; ++i) row.segment(lc * m + i * p, p) = z_hist_[i];
    phi_.setZero();
    for (int j = 0; j < row.size(); ++j)
        phi_.block(0, j * m, m, m) = row[j] * Eigen::MatrixXd::Identity(m, m);
    return phi_;
}

Eigen::VectorXd RcacController::control_output() const { return phi_ * theta_; }

Eigen::VectorXd RcacController::stacked_inputs() const {
    const int m = cfg_.input_dim;
    Eigen::VectorXd stacked(cfg_.target_window * m);
    for (int i = 0; i < cfg_.target_window; ++i) stacked.segment(i * m, m) = u_hist_[i];
    return stacked;
}

Eigen::MatrixXd RcacController::stacked_regressors() const {
    const int m = cfg_.input_dim;
    Eigen::MatrixXd stacked(cfg_.target_window * m, cfg_.theta_dim());
    for (int i = 0; i < cfg_.target_window; ++i)
        stacked.middleRows(i * m, m) = phi_hist_[i];
    return stacked;
}

bool RcacController::rls_update(const Eigen::MatrixXd& target_model,
                                const Eigen::VectorXd& z,
                                const Eigen::VectorXd& stacked_inputs,
                                const Eigen::MatrixXd& stacked_regressors) {
    const int m = cfg_.input_dim;
    const int p = cfg_.perf_dim;
    const int ltheta = cfg_.theta_dim();
    const int rows = cfg_.target_window * m;
    if (target_model.rows() != p || target_model.cols() != rows)
        throw ConfigError("target_model", "dimension mismatch");
    if (z.size() != p) throw ConfigError("z", "dimension mismatch");
    if (stacked_inputs.size() != rows) throw ConfigError("stacked_inputs", "dimension mismatch");
    if (stacked_regressors.rows() != rows || stacked_regressors.cols() != ltheta)
        throw ConfigError("stacked_regressors", "dimension mismatch");

    Eigen::MatrixXd filtered(p + m, ltheta);
    filtered.topRows(p) = target_model * stacked_regressors;
    filtered.bottomRows(m) = phi_;

    Eigen::MatrixXd rbar = Eigen::MatrixXd::Zero(p + m, p + m);
    rbar.topLeftCorner(p, p).setIdentity();
    rbar.bottomRightCorner(m, m) =
        cfg_.control_weight * Eigen::MatrixXd::Identity(m, m);

    const Eigen::LLT<Eigen::MatrixXd> cov_llt(cov_);
    if (cov_llt.info() != Eigen::Success) {
        ++skipped_;
        return false;
    }
    Eigen::MatrixXd info_matrix =
        cov_llt.solve(Eigen::MatrixXd::Identity(ltheta, ltheta)) +
        filtered.transpose() * rbar * filtered;
    info_matrix = 0.5 * (info_matrix + info_matrix.transpose());

    const Eigen::LLT<Eigen::MatrixXd> info_llt(info_matrix);
    if (info_llt.info() != Eigen::Success) {
        ++skipped_;
        return false;
    }

    const Eigen::MatrixXd weighted = rbar * filtered;
    Eigen::MatrixXd gamma = rbar - weighted * info_llt.solve(weighted.transpose());
    Eigen::MatrixXd cov_next =
        cov_ - cov_ * filtered.transpose() * gamma * filtered * cov_;
    cov_next = 0.5 * (cov_next + cov_next.transpose());

    Eigen::VectorXd innovation(p + m);
    innovation.head(p) =
        retrospective_variable(target_model, z, stacked_inputs, stacked_regressors, theta_);
    innovation.tail(m) = phi_ * theta_;

    Eigen::VectorXd theta_next =
        theta_ - cov_next * (filtered.transpose() * (rbar * innovation));
    if (!theta_next.allFinite() || !cov_next.allFinite())
        throw DivergedError("controller coefficients are non-finite");

    theta_ = std::move(theta_next);
    cov_ = std::move(cov_next);
    return true;
}

void RcacController::set_theta(const Eigen::VectorXd& theta) {
    if (theta.size() != cfg_.theta_dim()) throw ConfigError("theta", "dimension mismatch");
    theta_ = theta;
}

void RcacController::push_history(const Eigen::VectorXd& u, const Eigen::VectorXd& z) {
    if (u.size() != cfg_.input_dim) throw ConfigError("u", "dimension mismatch");
    if (z.size() != cfg_.perf_dim) throw ConfigError("z", "dimension mismatch");
    phi_hist_.push_front(phi_);
    u_hist_.push_front(u);
    z_hist_.push_front(z);
    zeta_ += z[0];
    phi_hist_.pop_back();
    u_hist_.pop_back();
    z_hist_.pop_back();
}

}  // namespace esctk
