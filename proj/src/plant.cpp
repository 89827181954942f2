#include "esctk/plant.hpp"

#include <cmath>

#include "esctk/errors.hpp"

namespace esctk {

Eigen::VectorXd ReferenceSchedule::at(double t) const {
    const Eigen::VectorXd* current = &initial;
    for (const Switch& sw : switches) {
        if (t > sw.after_time)
            current = &sw.value;
        else
            break;
    }
    return *current;
}

void StaticMap::validate() const {
    const int m = input_dim();
    if (reference.initial.size() != m)
        throw ConfigError("plant.reference", "dimension must match the map kind");
    for (const auto& sw : reference.switches)
        if (sw.value.size() != m)
            throw ConfigError("plant.reference_after", "dimension must match the map kind");
}

Eigen::VectorXd StaticMap::eval(const Eigen::VectorXd& u, double t) const {
    if (u.size() != input_dim())
        throw ConfigError("plant.input", "input dimension mismatch");
    const Eigen::VectorXd r = reference.at(t);
    Eigen::VectorXd cost(1);
    cost[0] = (u - r).squaredNorm();
    return cost;
}

VanDerPolPlant::VanDerPolPlant(const Eigen::Vector2d& x0, int window_len)
    : state_(x0), window_len_(window_len) {
    if (window_len_ < 1)
        throw ConfigError("plant.window_len", "window length must be positive");
    window_.push_back(state_);
}

Eigen::Vector2d VanDerPolPlant::derivative(const Eigen::Vector2d& x,
                                           const Eigen::Vector2d& gains) {
    const double feedback = gains[0] * x[0] + gains[1] * x[1];
    return {x[1], -x[0] - (x[1] * x[1] - 1.0) * x[1] + feedback};
}

Eigen::Vector2d VanDerPolPlant::rk4_step(const Eigen::Vector2d& x,
                                         const Eigen::Vector2d& gains, double h) {
    const Eigen::Vector2d s1 = derivative(x, gains);
    const Eigen::Vector2d s2 = derivative(x + 0.5 * h * s1, gains);
    const Eigen::Vector2d s3 = derivative(x + 0.5 * h * s2, gains);
    const Eigen::Vector2d s4 = derivative(x + h * s3, gains);
    return x + (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
}

void VanDerPolPlant::step_raw(const Eigen::Vector2d& gains, double h) {
    state_ = rk4_step(state_, gains, h);
}

void VanDerPolPlant::push_sample() {
    window_.push_back(state_);
    while (static_cast<int>(window_.size()) > window_len_) window_.pop_front();
}

void VanDerPolPlant::advance(const Eigen::Vector2d& gains, double dt, int substeps) {
    if (!(dt > 0.0)) throw ConfigError("sim.t_s", "sample time must be positive");
    if (substeps < 1) throw ConfigError("sim.substeps", "substeps must be >= 1");
    const double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) state_ = rk4_step(state_, gains, h);
    if (!state_.allFinite()) throw DivergedError("Van der Pol state is non-finite");
    push_sample();
}

double VanDerPolPlant::cost() const {
    const auto n = static_cast<double>(window_.size());
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& x : window_) mean += x;
    mean /= n;
    Eigen::Vector2d var = Eigen::Vector2d::Zero();
    for (const auto& x : window_) var += (x - mean).cwiseProduct(x - mean);
    var /= n;  // population variance
    return std::sqrt(var[0]) + std::sqrt(var[1]);
}

}  // namespace esctk
