#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

namespace esctk {

// One Kalman filter per cost channel estimating [gradient; bias] of that
// channel over the input, from a stack of lagged (input, cost) pairs.
struct GradKfConfig {
    int input_dim = 1;   // m
    int cost_dim = 1;    // number of cost channels
    std::vector<double> process_noise;        // q_i > 0 per channel
    std::vector<double> measurement_noise;    // r_i > 0 per channel
    std::vector<double> initial_covariance;   // p_{i,0} > 0 per channel
    std::vector<int> lags;  // 0 < k_1 < ... < k_m

    void validate() const;
};

class GradientKf {
public:
    explicit GradientKf(const GradKfConfig& cfg);

    // Push the aligned pair (u_prev, cost) -- u_prev is the input that
    // produced this cost sample -- then run one filter update per channel.
    // Measurement rows pair the costs at ages (0, k_1, ..., k_m) with the
    // inputs at the same ages; missing history is zero until warm. Returns
    // the updated gradient estimate, one row per channel.
    // A channel update is skipped when its innovation covariance is
    // ill-conditioned (condition number > 1e12). Non-finite estimates throw
    // DivergedError.
    Eigen::MatrixXd step(const Eigen::VectorXd& cost, const Eigen::VectorXd& u_prev);

    Eigen::MatrixXd gradient() const;  // cost_dim x input_dim
    const Eigen::MatrixXd& covariance(int channel) const;
    const Eigen::VectorXd& state(int channel) const;  // [gradient; bias]
    long skipped_updates() const { return skipped_; }

private:
    GradKfConfig cfg_;
    std::vector<Eigen::VectorXd> xhat_;  // per channel, size m+1
    std::vector<Eigen::MatrixXd> cov_;   // per channel, (m+1)x(m+1)
    std::deque<Eigen::VectorXd> u_hist_;  // front = newest
    std::deque<Eigen::VectorXd> cost_hist_;
    long skipped_ = 0;
};

}  // namespace esctk
