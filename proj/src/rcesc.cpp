#include "esctk/rcesc.hpp"

#include "esctk/errors.hpp"

namespace esctk {

Eigen::VectorXd normalize_cost(const Eigen::VectorXd& cost, double nu) {
    Eigen::VectorXd z(cost.size());
    for (Eigen::Index i = 0; i < cost.size(); ++i) {
        if (cost[i] < 0.0)
            throw ConfigError("cost", "cost components must be nonnegative");
        z[i] = cost[i] / (1.0 + nu * cost[i]);
    }
    return z;
}

Eigen::MatrixXd gradient_to_target_model(const Eigen::MatrixXd& gradient, double floor) {
    if (!(floor > 0.0)) throw ConfigError("eps", "gradient floor must be positive");
    const int p = static_cast<int>(gradient.rows());
    const int m = static_cast<int>(gradient.cols());
    Eigen::MatrixXd target = Eigen::MatrixXd::Zero(p, m * m);
    for (int j = 0; j < p; ++j) {
        const double norm = gradient.row(j).norm();
        const double scale = norm >= floor ? norm : floor;
        for (int i = 0; i < m; ++i) target(j, i * m + i) = gradient(j, i) / scale;
    }
    return target;
}

void RcescConfig::validate() const {
    rcac.validate();
    kf.validate();
    dither.validate();
    if (normalization < 0.0) throw ConfigError("nu", "must be nonnegative");
    if (!(gradient_floor > 0.0)) throw ConfigError("eps", "must be positive");
    if (!(sample_time > 0.0)) throw ConfigError("t_s", "must be positive");
    if (kf.cost_dim != rcac.perf_dim)
        throw ConfigError("kf", "cost channels must match the performance dimension");
    if (kf.input_dim != rcac.input_dim)
        throw ConfigError("kf", "input dimension must match the controller");
    if (rcac.target_window != rcac.input_dim)
        throw ConfigError("l_f", "target window must equal the input dimension");
    if (dither.channels() != rcac.input_dim)
        throw ConfigError("dither", "channel count must match the input dimension");
}

RcescController::RcescController(const RcescConfig& cfg)
    : cfg_(cfg), rcac_(cfg.rcac), kf_(cfg.kf),
      u_prev_(Eigen::VectorXd::Zero(cfg.rcac.input_dim)) {
    cfg_.validate();
}

RcescController::StepOutput RcescController::step(const Eigen::VectorXd& cost, long k) {
    StepOutput out;
    out.z = normalize_cost(cost, cfg_.normalization);
    out.gradient = kf_.step(cost, u_prev_);
    const Eigen::MatrixXd target =
        gradient_to_target_model(out.gradient, cfg_.gradient_floor);

    rcac_.build_regressor();
    const Eigen::VectorXd stacked_u = rcac_.stacked_inputs();
    const Eigen::MatrixXd stacked_phi = rcac_.stacked_regressors();
    rcac_.rls_update(target, out.z, stacked_u, stacked_phi);

    out.du = rcac_.control_output();
    out.dither = cfg_.dither.value(k, cfg_.sample_time);
    out.u = out.du + out.dither;
    if (!out.u.allFinite()) throw DivergedError("control output is non-finite");

    rcac_.push_history(out.u, out.z);
    u_prev_ = out.u;
    return out;
}

}  // namespace esctk
