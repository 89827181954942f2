#pragma once

#include <Eigen/Dense>
#include <optional>

#include "esctk/dither.hpp"
#include "esctk/gradkf.hpp"
#include "esctk/rcac.hpp"

namespace esctk {

// Componentwise z_i = J_i / (1 + nu*J_i). Requires J_i >= 0; for nu > 0 the
// result is bounded in [0, 1/nu).
Eigen::VectorXd normalize_cost(const Eigen::VectorXd& cost, double nu);

// Builds the FIR target model N = [N_1 ... N_m] from a gradient estimate
// (one row per cost channel). Block N_i places the gradient's i-th column,
// row-normalized by max(row norm, floor), into its own column i; all other
// entries are zero. Row norms never exceed 1.
Eigen::MatrixXd gradient_to_target_model(const Eigen::MatrixXd& gradient, double floor);

struct RcescConfig {
    double normalization = 0.0;    // nu >= 0
    double gradient_floor = 1e-4;  // epsilon > 0
    double sample_time = 1.0;      // s, for dither evaluation
    RcacConfig rcac;               // target_window must equal input_dim
    GradKfConfig kf;               // cost_dim must equal rcac.perf_dim
    DitherSchedule dither;

    void validate() const;
};

// Extremum-seeking controller with a vanishing perturbation. Per step:
// normalize the cost, update the gradient filter from (J_k, u_{k-1}),
// convert the estimate to the target model, re-optimize the coefficients,
// form delta_u, and add the scheduled dither. Pure function of
// (state, config, J_k, k): reruns agree bitwise.
class RcescController {
public:
    explicit RcescController(const RcescConfig& cfg);

    struct StepOutput {
        Eigen::VectorXd u;       // applied control
        Eigen::VectorXd du;      // coefficient-driven part
        Eigen::VectorXd dither;
        Eigen::VectorXd z;       // normalized cost
        Eigen::MatrixXd gradient;  // estimate used for the target model
    };

    StepOutput step(const Eigen::VectorXd& cost, long k);

    const RcacController& rcac() const { return rcac_; }
    const GradientKf& kf() const { return kf_; }
    const RcescConfig& config() const { return cfg_; }

private:
    RcescConfig cfg_;
    RcacController rcac_;
    GradientKf kf_;
    Eigen::VectorXd u_prev_;  // 1-step delay on the applied control
};

}  // namespace esctk
