#include "esctk/simulate.hpp"

#include <string>

#include "esctk/errors.hpp"

namespace esctk {

namespace {

struct TraceBuilder {
    SimulationTrace trace;
    bool with_estimates = false;
    bool with_state = false;
    int m = 0, p = 0, ltheta = 0;
    bool initialized = false;

    void init(const ControllerSignals& sig, const Eigen::VectorXd& cost, bool vdp) {
        m = static_cast<int>(sig.u.size());
        p = static_cast<int>(cost.size());
        with_estimates = sig.z.has_value();
        with_state = vdp;
        auto add = [&](const std::string& base, int count) {
            for (int i = 1; i <= count; ++i)
                trace.columns.push_back(base + "_" + std::to_string(i));
        };
        trace.columns.push_back("t_seconds");
        add("u", m);
        add("du", m);
        add("d", m);
        add("J", p);
        if (with_estimates) {
            add("z", p);
            ltheta = sig.theta ? static_cast<int>(sig.theta->size()) : 0;
            add("theta", ltheta);
            add("gradJ", p * m);
        }
        if (with_state) add("x", 2);
        trace.data.assign(trace.columns.size(), {});
        initialized = true;
    }

    void push(double t, const ControllerSignals& sig, const Eigen::VectorXd& cost,
              const Eigen::Vector2d* state) {
        size_t c = 0;
        auto emit = [&](double v) { trace.data[c++].push_back(v); };
        emit(t);
        for (int i = 0; i < m; ++i) emit(sig.u[i]);
        for (int i = 0; i < m; ++i) emit(sig.du[i]);
        for (int i = 0; i < m; ++i) emit(sig.dither[i]);
        for (int i = 0; i < p; ++i) emit(cost[i]);
        if (with_estimates) {
            for (int i = 0; i < p; ++i) emit((*sig.z)[i]);
            for (int i = 0; i < ltheta; ++i) emit((*sig.theta)[i]);
            for (int j = 0; j < p; ++j)
                for (int i = 0; i < m; ++i) emit((*sig.gradient)(j, i));
        }
        if (with_state) {
            emit((*state)[0]);
            emit((*state)[1]);
        }
    }
};

RunResult finish(TraceBuilder& builder, std::optional<long> diverged_at,
                 const std::string& reason) {
    RunResult result;
    if (diverged_at)
        builder.trace.error_footer =
            "simulation diverged at step " + std::to_string(*diverged_at) + ": " + reason;
    result.trace = std::move(builder.trace);
    result.summary = summarize(result.trace);
    result.diverged_at = diverged_at;
    return result;
}

}  // namespace

RunResult run_loop(PlantHandle& plant, const StepFn& controller, double sample_time,
                   long horizon, int substeps) {
    if (horizon < 1) throw ConfigError("sim.horizon", "horizon must be >= 1");
    if (!(sample_time > 0.0)) throw ConfigError("sim.t_s", "sample time must be positive");

    const bool vdp = std::holds_alternative<VanDerPolPlant>(plant);
    TraceBuilder builder;
    Eigen::VectorXd held;  // static-map input over the current interval
    if (auto* map = std::get_if<StaticMap>(&plant))
        held = Eigen::VectorXd::Zero(map->input_dim());

    std::optional<long> diverged;
    std::string reason;
    for (long k = 0; k < horizon && !diverged; ++k) {
        const double t = static_cast<double>(k) * sample_time;
        Eigen::VectorXd cost;
        Eigen::Vector2d state_sample = Eigen::Vector2d::Zero();
        if (vdp) {
            auto& p = std::get<VanDerPolPlant>(plant);
            cost = Eigen::VectorXd::Constant(1, p.cost());
            state_sample = p.state();
        } else {
            cost = std::get<StaticMap>(plant).eval(held, t);
        }
        try {
            ControllerSignals sig = controller(cost, k);
            if (!builder.initialized) builder.init(sig, cost, vdp);
            builder.push(t, sig, cost, &state_sample);
            if (vdp)
                std::get<VanDerPolPlant>(plant).advance(sig.u, sample_time, substeps);
            else
                held = sig.u;
        } catch (const DivergedError& err) {
            diverged = k;
            reason = err.what();
        }
    }
    return finish(builder, diverged, reason);
}

RunResult run_esc_loop(PlantHandle& plant, const EscConfig& cfg, double sample_time,
                       long horizon, int esc_substeps) {
    if (horizon < 1) throw ConfigError("sim.horizon", "horizon must be >= 1");
    if (esc_substeps < 1) throw ConfigError("sim.esc_substeps", "must be >= 1");
    cfg.validate();

    const bool vdp = std::holds_alternative<VanDerPolPlant>(plant);
    const int m = cfg.input_dim();
    const double h = sample_time / esc_substeps;

    TraceBuilder builder;
    EscState state(m);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);

    std::optional<long> diverged;
    std::string reason;
    for (long k = 0; k < horizon && !diverged; ++k) {
        const double t = static_cast<double>(k) * sample_time;
        try {
            if (vdp) {
                auto& p = std::get<VanDerPolPlant>(plant);
                const Eigen::VectorXd cost = Eigen::VectorXd::Constant(1, p.cost());
                const Eigen::Vector2d state_sample = p.state();
                for (int j = 0; j < esc_substeps; ++j) {
                    u = esc_step(cfg, state, cost[0], h);  // cost held over the sample
                    p.step_raw(u, h);
                    if (j == 0) {
                        ControllerSignals sig{u, state.integrator, u - state.integrator,
                                              std::nullopt, std::nullopt, std::nullopt};
                        if (!builder.initialized) builder.init(sig, cost, vdp);
                        builder.push(t, sig, cost, &state_sample);
                    }
                }
                if (!p.state().allFinite())
                    throw DivergedError("Van der Pol state is non-finite");
                p.push_sample();
            } else {
                const auto& map = std::get<StaticMap>(plant);
                const Eigen::VectorXd cost_sample = map.eval(u, t);
                for (int j = 0; j < esc_substeps; ++j) {
                    const double tj = t + j * h;
                    const Eigen::VectorXd cost = map.eval(u, tj);  // memoryless map
                    u = esc_step(cfg, state, cost[0], h);
                    if (j == 0) {
                        ControllerSignals sig{u, state.integrator, u - state.integrator,
                                              std::nullopt, std::nullopt, std::nullopt};
                        if (!builder.initialized) builder.init(sig, cost_sample, vdp);
                        builder.push(t, sig, cost_sample, nullptr);
                    }
                }
            }
        } catch (const DivergedError& err) {
            diverged = k;
            reason = err.what();
        }
    }
    return finish(builder, diverged, reason);
}

}  // namespace esctk
