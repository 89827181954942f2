#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>

#include "esctk/esc.hpp"
#include "esctk/plant.hpp"
#include "esctk/scenario.hpp"
#include "esctk/trace.hpp"

namespace esctk {

// Per-step controller outputs for tracing. z/theta/gradient are recorded
// only when the controller supplies them.
struct ControllerSignals {
    Eigen::VectorXd u;
    Eigen::VectorXd du;
    Eigen::VectorXd dither;
    std::optional<Eigen::VectorXd> z;
    std::optional<Eigen::VectorXd> theta;
    std::optional<Eigen::MatrixXd> gradient;
};

using StepFn = std::function<ControllerSignals(const Eigen::VectorXd& cost, long k)>;

using PlantHandle = std::variant<StaticMap, VanDerPolPlant>;

// Synchronous sampled-data loop: for k = 0..horizon-1 sample J_k, step the
// controller, hold u_k over [k*T_s, (k+1)*T_s), advance the plant. Fully
// deterministic. Divergence stops the loop and is reported in the result
// with the partial trace kept.
RunResult run_loop(PlantHandle& plant, const StepFn& controller, double sample_time,
                   long horizon, int substeps);

// Classic-ESC loop run at micro-step resolution h = T_s/esc_substeps: the
// integrator, dither and (for static maps) the cost advance continuously;
// the Van der Pol cost is held over each sample interval. Rows are recorded
// once per sample.
RunResult run_esc_loop(PlantHandle& plant, const EscConfig& cfg, double sample_time,
                       long horizon, int esc_substeps);

}  // namespace esctk
