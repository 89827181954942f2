#include "esctk/gradkf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "esctk/errors.hpp"

namespace esctk {

namespace {
constexpr double kMaxCondition = 1e12;

void check_channel_scalars(const std::vector<double>& values, int count, const char* field) {
    if (static_cast<int>(values.size()) != count)
        throw ConfigError(field, "one value per cost channel required");
    for (double v : values)
        if (!(v > 0.0)) throw ConfigError(field, "must be positive");
}
}  // namespace

void GradKfConfig::validate() const {
    if (input_dim < 1) throw ConfigError("m", "input dimension must be positive");
    if (cost_dim < 1) throw ConfigError("l_J", "cost dimension must be positive");
    check_channel_scalars(process_noise, cost_dim, "kf_q");
    check_channel_scalars(measurement_noise, cost_dim, "kf_r");
    check_channel_scalars(initial_covariance, cost_dim, "kf_p0");
    if (static_cast<int>(lags.size()) != input_dim)
        throw ConfigError("lags", "one lag per input channel required");
    int previous = 0;
    for (int lag : lags) {
        if (lag <= previous)
            throw ConfigError("lags", "lags must be strictly increasing and positive");
        previous = lag;
    }
}

GradientKf::GradientKf(const GradKfConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int n = cfg_.input_dim + 1;
    for (int i = 0; i < cfg_.cost_dim; ++i) {
        xhat_.emplace_back(Eigen::VectorXd::Zero(n));
        cov_.emplace_back(cfg_.initial_covariance[i] * Eigen::MatrixXd::Identity(n, n));
    }
    const int depth = cfg_.lags.back() + 2;
    for (int i = 0; i < depth; ++i) {
        u_hist_.emplace_back(Eigen::VectorXd::Zero(cfg_.input_dim));
        cost_hist_.emplace_back(Eigen::VectorXd::Zero(cfg_.cost_dim));
    }
}

Eigen::MatrixXd GradientKf::step(const Eigen::VectorXd& cost,
                                 const Eigen::VectorXd& u_prev) {
    if (cost.size() != cfg_.cost_dim) throw ConfigError("J", "dimension mismatch");
    if (u_prev.size() != cfg_.input_dim) throw ConfigError("u", "dimension mismatch");

    u_hist_.push_front(u_prev);
    cost_hist_.push_front(cost);
    u_hist_.pop_back();
    cost_hist_.pop_back();

    const int m = cfg_.input_dim;
    const int n = m + 1;

    // Measurement rows at ages 0, k_1, ..., k_m into the aligned buffers.
    Eigen::MatrixXd meas_matrix(n, n);
    std::vector<int> ages(1, 0);
    ages.insert(ages.end(), cfg_.lags.begin(), cfg_.lags.end());
    for (int row = 0; row < n; ++row) {
        meas_matrix.row(row).head(m) = u_hist_[ages[row]].transpose();
        meas_matrix(row, m) = 1.0;
    }

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < cfg_.cost_dim; ++i) {
        Eigen::VectorXd stack(n);
        for (int row = 0; row < n; ++row) stack[row] = cost_hist_[ages[row]][i];

        const Eigen::MatrixXd predicted = cov_[i] + cfg_.process_noise[i] * identity;
        Eigen::MatrixXd innovation_cov =
            meas_matrix * predicted * meas_matrix.transpose() +
            cfg_.measurement_noise[i] * identity;
        if (!innovation_cov.allFinite() || !stack.allFinite()) {
            ++skipped_;
            continue;
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(innovation_cov);
        const double lo = eigs.eigenvalues()(0);
        const double hi = eigs.eigenvalues()(n - 1);
        if (!(lo > 0.0) || hi > kMaxCondition * lo) {
            ++skipped_;
            continue;
        }

        const Eigen::MatrixXd gain = predicted * meas_matrix.transpose() *
                                     innovation_cov.llt().solve(identity);
        Eigen::VectorXd xhat_next = xhat_[i] + gain * (stack - meas_matrix * xhat_[i]);
        Eigen::MatrixXd cov_next = (identity - gain * meas_matrix) * predicted;
        cov_next = 0.5 * (cov_next + cov_next.transpose());
        if (!xhat_next.allFinite() || !cov_next.allFinite())
            throw DivergedError("gradient estimate is non-finite");
        xhat_[i] = std::move(xhat_next);
        cov_[i] = std::move(cov_next);
    }
    return gradient();
}

Eigen::MatrixXd GradientKf::gradient() const {
    Eigen::MatrixXd g(cfg_.cost_dim, cfg_.input_dim);
    for (int i = 0; i < cfg_.cost_dim; ++i) g.row(i) = xhat_[i].head(cfg_.input_dim).transpose();
    return g;
}

const Eigen::MatrixXd& GradientKf::covariance(int channel) const {
    if (channel < 0 || channel >= cfg_.cost_dim)
        throw ConfigError("channel", "invalid cost channel");
    return cov_[static_cast<size_t>(channel)];
}

const Eigen::VectorXd& GradientKf::state(int channel) const {
    if (channel < 0 || channel >= cfg_.cost_dim)
        throw ConfigError("channel", "invalid cost channel");
    return xhat_[static_cast<size_t>(channel)];
}

}  // namespace esctk
