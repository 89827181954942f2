#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "esctk/esc.hpp"
#include "esctk/plant.hpp"
#include "esctk/rcesc.hpp"
#include "esctk/trace.hpp"

namespace esctk {

enum class ControllerType { Constant, Esc, Rcesc };

// Declarative description of one run: plant, controller, dither, timing.
// Scenarios parse from a flat key-value file with [plant], [controller],
// [dither], [esc_baseline] and [sim] sections.
struct Scenario {
    std::string name;

    // plant
    bool van_der_pol = false;
    StaticMap map;                 // when !van_der_pol
    Eigen::Vector2d x0{2.0, 0.0};  // Van der Pol initial state
    int window_len = 100;          // amplitude-detector window, samples

    // controller
    ControllerType controller = ControllerType::Rcesc;
    Eigen::VectorXd constant_value;  // ControllerType::Constant
    EscConfig esc;                   // ControllerType::Esc
    RcescConfig rcesc;               // ControllerType::Rcesc

    // optional second controller for --compare runs
    std::optional<EscConfig> esc_baseline;

    // sim
    double sample_time = 1.0;  // T_s, s
    long horizon = 1;          // steps
    int substeps = 1;          // plant ODE substeps per sample
    int esc_substeps = 50;     // classic-ESC micro-steps per sample

    int input_dim() const;
    void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

const std::vector<std::string>& builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);

struct RunResult {
    SimulationTrace trace;
    SummaryReport summary;
    std::optional<long> diverged_at;
};

// Executes the scenario's main controller. Deterministic; a divergence is
// reported in the result (partial trace retained) rather than thrown.
RunResult run_scenario(const Scenario& s);

// Executes the classic-ESC baseline (esc_baseline if present, otherwise the
// main controller must be the ESC) on the same plant.
RunResult run_scenario_esc_baseline(const Scenario& s);

}  // namespace esctk
