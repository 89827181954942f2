#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

namespace esctk {

// Piecewise-constant reference r(t). Each switch value applies strictly
// after its time, so r(switch_time) still returns the previous value.
struct ReferenceSchedule {
    struct Switch {
        double after_time = 0.0;  // s
        Eigen::VectorXd value;
    };

    Eigen::VectorXd initial;
    std::vector<Switch> switches;  // ascending after_time

    Eigen::VectorXd at(double t) const;
};

enum class MapKind { SisoQuadratic, MisoQuadratic };

// Memoryless quadratic cost map. SISO: J = (u - r)^2. MISO: scalar sum of
// the two squared component errors (p = 1 either way).
struct StaticMap {
    MapKind kind = MapKind::SisoQuadratic;
    ReferenceSchedule reference;

    int input_dim() const { return kind == MapKind::SisoQuadratic ? 1 : 2; }
    void validate() const;

    Eigen::VectorXd eval(const Eigen::VectorXd& u, double t) const;
};

// Forced oscillator  x'' + x + (x'^2 - 1) x' = u_fb  with full-state
// feedback u_fb = k1*x1 + k2*x2 (x1 = x, x2 = x'). The cost is an amplitude
// detector: population standard deviation of each sampled state over the
// most recent window_len samples, summed.
class VanDerPolPlant {
public:
    VanDerPolPlant(const Eigen::Vector2d& x0, int window_len);

    const Eigen::Vector2d& state() const { return state_; }
    void set_state(const Eigen::Vector2d& x) { state_ = x; }
    int window_len() const { return window_len_; }

    // std(x1 window) + std(x2 window); a shorter prefix is used until the
    // window fills. The initial state counts as the first sample.
    double cost() const;

    // Fixed-step RK4 over dt using dt/substeps internal steps; gains held
    // constant (ZOH). Appends the end state to the cost window.
    // Throws DivergedError if the state leaves the finite range.
    void advance(const Eigen::Vector2d& gains, double dt, int substeps);

    // One RK4 step of h seconds without touching the cost window. Used by
    // sub-sampled controllers that change gains inside a sample interval.
    void step_raw(const Eigen::Vector2d& gains, double h);

    // Record the current state into the cost window.
    void push_sample();

    static Eigen::Vector2d derivative(const Eigen::Vector2d& x, const Eigen::Vector2d& gains);
    static Eigen::Vector2d rk4_step(const Eigen::Vector2d& x, const Eigen::Vector2d& gains,
                                    double h);

private:
    Eigen::Vector2d state_;
    int window_len_;
    std::deque<Eigen::Vector2d> window_;
};

}  // namespace esctk
