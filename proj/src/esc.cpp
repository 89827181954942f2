#include "esctk/esc.hpp"

#include <cmath>

#include "esctk/errors.hpp"

namespace esctk {

void EscConfig::validate() const {
    if (!(amplitude > 0.0))
        throw ConfigError("controller.a", "dither amplitude must be positive");
    if (omegas.empty())
        throw ConfigError("controller.omega", "at least one frequency required");
    for (size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0))
            throw ConfigError("controller.omega", "frequencies must be positive");
        for (size_t j = i + 1; j < omegas.size(); ++j)
            if (omegas[i] == omegas[j])
                throw ConfigError("controller.omega", "frequencies must be pairwise distinct");
    }
}

Eigen::VectorXd esc_dither(const EscConfig& cfg, double t) {
    const int m = cfg.input_dim();
    Eigen::VectorXd d(m);
    for (int i = 0; i < m; ++i) d[i] = cfg.amplitude * std::sin(cfg.omegas[i] * t);
    return d;
}

Eigen::VectorXd esc_gradient_estimate(const EscConfig& cfg, double cost, double t) {
    const int m = cfg.input_dim();
    Eigen::VectorXd g(m);
    const double scale = 2.0 / cfg.amplitude;
    for (int i = 0; i < m; ++i) g[i] = scale * cost * std::sin(cfg.omegas[i] * t);
    return g;
}

Eigen::VectorXd esc_step(const EscConfig& cfg, EscState& state, double cost, double dt) {
    // Descend along the demodulated gradient; the cost sample and the
    // demodulating sine share the same instant.
    state.integrator -= dt * cfg.gain * esc_gradient_estimate(cfg, cost, state.t);
    state.t += dt;
    Eigen::VectorXd u = state.integrator + esc_dither(cfg, state.t);
    if (!u.allFinite()) throw DivergedError("extremum-seeking output is non-finite");
    return u;
}

}  // namespace esctk
