#pragma once

#include <Eigen/Dense>
#include <deque>

namespace esctk {

// Controller structure. GeneralIO realizes
//   delta_u_k = sum_i P_i u_{k-i} + sum_i Q_i z_{k-i},  i = 1..window,
// as phi_k * theta_k with phi_k = [u^T... z^T...] (x) I_m. PidLike (m = p = 1)
// uses phi_k = [z_{k-1}, zeta_{k-1}, z_{k-1} - z_{k-2}] restricted to the
// enabled terms, zeta being the running sum of z.
struct RcacStructure {
    bool pid = false;
    int window = 1;  // l_c (GeneralIO)
    bool use_p = true, use_i = true, use_d = true;  // PidLike mask
};

struct RcacConfig {
    RcacStructure structure;
    int input_dim = 1;        // m
    int perf_dim = 1;         // p
    double control_weight = 0.0;      // r_u >= 0, R_u = r_u*I_m
    double initial_covariance = 1.0;  // p0 > 0, P_0 = p0*I
    int target_window = 1;    // l_f, rows of the FIR target model stack

    int theta_dim() const;    // l_theta
    void validate() const;
};

// z_k - N*(U - Phi*theta_hat): the performance that would have resulted had
// the stacked past inputs U been produced by coefficients theta_hat, filtered
// through the FIR target model N.
Eigen::VectorXd retrospective_variable(const Eigen::MatrixXd& target_model,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& stacked_inputs,
                                       const Eigen::MatrixXd& stacked_regressors,
                                       const Eigen::VectorXd& theta_hat);

// Retrospective-cost controller with RLS coefficient re-optimization.
// theta starts at zero and P at p0*I; each rls_update incorporates one datum
// (N, z, U, Phi, current phi) as the exact recursive minimizer of the
// cumulative cost  sum_i [ zhat_i^T zhat_i + (phi_i th)^T R_u (phi_i th) ]
// + (th - th_0)^T P_0^{-1} (th - th_0).
class RcacController {
public:
    explicit RcacController(const RcacConfig& cfg);

    // phi_k from the buffered history (zero-filled before enough exists).
    // Stored; control_output and rls_update use the stored value.
    const Eigen::MatrixXd& build_regressor();

    // delta_u_k = phi_k * theta_k
    Eigen::VectorXd control_output() const;

    // U_k = [u_{k-1}; ...; u_{k-l_f}]
    Eigen::VectorXd stacked_inputs() const;

    // Phi_k = [phi_{k-1}; ...; phi_{k-l_f}]
    Eigen::MatrixXd stacked_regressors() const;

    // One RLS step. Returns false (state untouched) when the information
    // matrix is numerically singular. Throws DivergedError on non-finite
    // results.
    bool rls_update(const Eigen::MatrixXd& target_model, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& stacked_inputs,
                    const Eigen::MatrixXd& stacked_regressors);

    // Append the applied input and performance; archives the current
    // regressor as phi_{k} for future stacks and advances the integrator.
    void push_history(const Eigen::VectorXd& u, const Eigen::VectorXd& z);

    const Eigen::VectorXd& theta() const { return theta_; }

    // Warm start with known coefficients in place of theta_0 = 0.
    void set_theta(const Eigen::VectorXd& theta);

    const Eigen::MatrixXd& covariance() const { return cov_; }
    const Eigen::MatrixXd& regressor() const { return phi_; }
    const RcacConfig& config() const { return cfg_; }
    long skipped_updates() const { return skipped_; }

private:
    RcacConfig cfg_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd phi_;
    std::deque<Eigen::VectorXd> u_hist_;  // front = newest (u_{k-1})
    std::deque<Eigen::VectorXd> z_hist_;
    std::deque<Eigen::MatrixXd> phi_hist_;
    double zeta_ = 0.0;  // running sum of pushed z (PidLike integrator)
    long skipped_ = 0;
};

}  // namespace esctk
