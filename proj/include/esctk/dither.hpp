#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace esctk {

enum class DitherKind { None, Sinusoid, DecayingSinusoid, ExpDecay };

// Deterministic perturbation signal d_k evaluated at t = k*T_s. The output
// depends only on (schedule, k); it never sees controller or plant state.
// DecayingSinusoid and ExpDecay vanish as k grows: |d_k| <= a*exp(-k*T_s/tau).
struct DitherSchedule {
    DitherKind kind = DitherKind::None;
    double amplitude = 0.0;
    std::vector<double> omegas;  // rad/s, one per channel (sinusoid kinds)
    double tau = std::numeric_limits<double>::infinity();  // decay constant, s
    int dim = 1;  // channel count for kinds without per-channel frequencies

    int channels() const;
    void validate() const;

    // d at continuous time t (seconds).
    Eigen::VectorXd at(double t) const;

    // d_k = d(k*T_s).
    Eigen::VectorXd value(long k, double sample_time) const {
        return at(static_cast<double>(k) * sample_time);
    }
};

}  // namespace esctk
