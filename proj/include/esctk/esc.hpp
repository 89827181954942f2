#pragma once

#include <Eigen/Dense>
#include <vector>

namespace esctk {

// Classic perturbation-based extremum seeking, SISO and MISO. The dither
// d(t) = a*sin(omega_i*t) excites the plant, the demodulated cost
// (2/a)*J*sin(omega_i*t) estimates the gradient, and an integrator descends
// along it. Frequencies must be positive and pairwise distinct.
struct EscConfig {
    double amplitude = 0.0;        // a, input units
    std::vector<double> omegas;    // rad/s, one per input channel
    double gain = 0.0;             // K_esc, 1/s

    int input_dim() const { return static_cast<int>(omegas.size()); }
    void validate() const;
};

struct EscState {
    Eigen::VectorXd integrator;  // accumulated delta-u, input units
    double t = 0.0;              // s

    explicit EscState(int m) : integrator(Eigen::VectorXd::Zero(m)) {}
};

// d(t) = a*[sin(omega_1 t), ..., sin(omega_m t)]^T
Eigen::VectorXd esc_dither(const EscConfig& cfg, double t);

// (2/a)*J*[sin(omega_1 t), ..., sin(omega_m t)]^T. Averaged over a dither
// period this approaches the cost gradient.
Eigen::VectorXd esc_gradient_estimate(const EscConfig& cfg, double cost, double t);

// One forward-Euler integrator step of dt seconds: demodulate at the
// current time, descend, advance time, and add the dither at the new time.
// Returns the control to hold over the next dt.
Eigen::VectorXd esc_step(const EscConfig& cfg, EscState& state, double cost, double dt);

}  // namespace esctk
