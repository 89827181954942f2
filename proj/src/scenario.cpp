#include "esctk/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "esctk/errors.hpp"
#include "esctk/simulate.hpp"

namespace esctk {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

// Flat key-value file with [section] headers and # comments.
class KeyValues {
public:
    explicit KeyValues(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int number = 0;
        std::string section;
        while (std::getline(in, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ParseError(number, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw ParseError(number, "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError(number, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ParseError(number, "empty key");
            const std::string full = section.empty() ? key : section + "." + key;
            if (entries_.count(full))
                throw ParseError(number, "duplicate key " + full);
            entries_[full] = Entry{value, number, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const Entry& e = require(key);
        return e.value;
    }

    double get_double(const std::string& key) const {
        const Entry& e = require(key);
        return parse_double(e.value, e.line);
    }

    long get_long(const std::string& key) const {
        const Entry& e = require(key);
        try {
            size_t pos = 0;
            const long v = std::stol(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ParseError(e.line, "expected an integer for " + key);
        }
    }

    std::vector<double> get_list(const std::string& key) const {
        const Entry& e = require(key);
        std::vector<double> values;
        std::stringstream ss(e.value);
        std::string cell;
        while (std::getline(ss, cell, ',')) values.push_back(parse_double(trim(cell), e.line));
        if (values.empty()) throw ParseError(e.line, "expected a value list for " + key);
        return values;
    }

    std::vector<int> get_int_list(const std::string& key) const {
        std::vector<int> out;
        for (double v : get_list(key)) out.push_back(static_cast<int>(v));
        return out;
    }

    void check_all_used() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used) throw ParseError(entry.line, "unknown key " + key);
    }

private:
    const Entry& require(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(key, "missing required key");
        it->second.used = true;
        return it->second;
    }

    static double parse_double(const std::string& text, int line) {
        try {
            size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ParseError(line, "expected a number, got '" + text + "'");
        }
    }

    std::map<std::string, Entry> entries_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

RcacStructure parse_structure(const std::string& text, const KeyValues& kv) {
    RcacStructure s;
    if (text == "general") {
        s.pid = false;
        s.window = static_cast<int>(kv.get_long("controller.l_c"));
        return s;
    }
    s.pid = true;
    s.use_p = s.use_i = s.use_d = false;
    for (char c : text) {
        if (c == 'p') s.use_p = true;
        else if (c == 'i') s.use_i = true;
        else if (c == 'd') s.use_d = true;
        else throw ConfigError("controller.structure",
                               "expected 'general' or a subset of 'pid'");
    }
    return s;
}

std::string structure_name(const RcacStructure& s) {
    if (!s.pid) return "general";
    std::string name;
    if (s.use_p) name += 'p';
    if (s.use_i) name += 'i';
    if (s.use_d) name += 'd';
    return name;
}

DitherKind parse_dither_kind(const std::string& text) {
    if (text == "none") return DitherKind::None;
    if (text == "sinusoid") return DitherKind::Sinusoid;
    if (text == "decaying_sinusoid") return DitherKind::DecayingSinusoid;
    if (text == "exp_decay") return DitherKind::ExpDecay;
    throw ConfigError("dither.kind", "unknown dither kind '" + text + "'");
}

std::string dither_kind_name(DitherKind kind) {
    switch (kind) {
        case DitherKind::None: return "none";
        case DitherKind::Sinusoid: return "sinusoid";
        case DitherKind::DecayingSinusoid: return "decaying_sinusoid";
        case DitherKind::ExpDecay: return "exp_decay";
    }
    return "none";
}

EscConfig parse_esc(const KeyValues& kv, const std::string& section) {
    EscConfig cfg;
    cfg.amplitude = kv.get_double(section + ".a");
    cfg.gain = kv.get_double(section + ".k_esc");
    cfg.omegas = kv.get_list(section + ".omega");
    return cfg;
}

DitherSchedule default_dither(int m) {
    DitherSchedule d;
    d.kind = DitherKind::DecayingSinusoid;
    d.amplitude = 0.02;
    d.tau = 100.0;
    d.omegas.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) d.omegas[static_cast<size_t>(i)] = 1.0 + 0.7 * i;
    return d;
}

}  // namespace

int Scenario::input_dim() const {
    return van_der_pol ? 2 : map.input_dim();
}

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("name", "scenario name required");
    if (!(sample_time > 0.0)) throw ConfigError("sim.t_s", "must be positive");
    if (horizon < 1) throw ConfigError("sim.horizon", "must be >= 1");
    if (substeps < 1) throw ConfigError("sim.substeps", "must be >= 1");
    if (esc_substeps < 1) throw ConfigError("sim.esc_substeps", "must be >= 1");
    if (van_der_pol) {
        if (window_len < 1) throw ConfigError("plant.window_len", "must be >= 1");
        if (!x0.allFinite()) throw ConfigError("plant.x0", "must be finite");
    } else {
        map.validate();
    }
    const int m = input_dim();
    switch (controller) {
        case ControllerType::Constant:
            if (constant_value.size() != m)
                throw ConfigError("controller.value", "dimension must match the plant");
            break;
        case ControllerType::Esc:
            esc.validate();
            if (esc.input_dim() != m)
                throw ConfigError("controller.omega", "one frequency per plant input");
            break;
        case ControllerType::Rcesc:
            rcesc.validate();
            if (rcesc.rcac.input_dim != m)
                throw ConfigError("controller.structure",
                                  "controller input dimension must match the plant");
            break;
    }
    if (esc_baseline) {
        esc_baseline->validate();
        if (esc_baseline->input_dim() != m)
            throw ConfigError("esc_baseline.omega", "one frequency per plant input");
    }
}

Scenario parse_scenario(const std::string& text) {
    const KeyValues kv(text);
    Scenario s;
    s.name = kv.get_string("name");

    const std::string kind = kv.get_string("plant.kind");
    if (kind == "van_der_pol") {
        s.van_der_pol = true;
        if (kv.has("plant.x0")) {
            const auto x0 = kv.get_list("plant.x0");
            if (x0.size() != 2) throw ConfigError("plant.x0", "expected two components");
            s.x0 = Eigen::Vector2d(x0[0], x0[1]);
        }
        if (kv.has("plant.window_len"))
            s.window_len = static_cast<int>(kv.get_long("plant.window_len"));
    } else if (kind == "siso_quadratic" || kind == "miso_quadratic") {
        s.van_der_pol = false;
        s.map.kind = kind == "siso_quadratic" ? MapKind::SisoQuadratic
                                              : MapKind::MisoQuadratic;
        s.map.reference.initial = to_vector(kv.get_list("plant.reference"));
        if (kv.has("plant.reference_after") || kv.has("plant.reference_switch_time")) {
            ReferenceSchedule::Switch sw;
            sw.after_time = kv.get_double("plant.reference_switch_time");
            sw.value = to_vector(kv.get_list("plant.reference_after"));
            s.map.reference.switches.push_back(std::move(sw));
        }
    } else {
        throw ConfigError("plant.kind", "unknown plant kind '" + kind + "'");
    }

    // sim block first so the controller can see the sample time.
    s.sample_time = kv.get_double("sim.t_s");
    s.horizon = kv.get_long("sim.horizon");
    if (kv.has("sim.substeps")) s.substeps = static_cast<int>(kv.get_long("sim.substeps"));
    if (kv.has("sim.esc_substeps"))
        s.esc_substeps = static_cast<int>(kv.get_long("sim.esc_substeps"));

    const std::string type = kv.get_string("controller.type");
    if (type == "constant") {
        s.controller = ControllerType::Constant;
        s.constant_value = to_vector(kv.get_list("controller.value"));
    } else if (type == "esc") {
        s.controller = ControllerType::Esc;
        s.esc = parse_esc(kv, "controller");
    } else if (type == "rcesc") {
        s.controller = ControllerType::Rcesc;
        RcescConfig cfg;
        cfg.sample_time = s.sample_time;
        cfg.rcac.structure = parse_structure(kv.get_string("controller.structure"), kv);
        cfg.rcac.input_dim = s.input_dim();
        cfg.rcac.perf_dim = 1;
        cfg.rcac.target_window = cfg.rcac.input_dim;
        cfg.rcac.control_weight = kv.get_double("controller.r_u");
        cfg.rcac.initial_covariance = kv.get_double("controller.p0");
        cfg.normalization = kv.get_double("controller.nu");
        if (kv.has("controller.eps")) cfg.gradient_floor = kv.get_double("controller.eps");
        cfg.kf.input_dim = cfg.rcac.input_dim;
        cfg.kf.cost_dim = cfg.rcac.perf_dim;
        cfg.kf.process_noise.assign(cfg.kf.cost_dim, kv.get_double("controller.kf_q"));
        cfg.kf.measurement_noise.assign(cfg.kf.cost_dim, kv.get_double("controller.kf_r"));
        cfg.kf.initial_covariance.assign(cfg.kf.cost_dim, kv.get_double("controller.kf_p0"));
        cfg.kf.lags = kv.get_int_list("controller.lags");
        if (kv.has("dither.kind")) {
            DitherSchedule d;
            d.kind = parse_dither_kind(kv.get_string("dither.kind"));
            d.dim = cfg.rcac.input_dim;
            if (d.kind != DitherKind::None) d.amplitude = kv.get_double("dither.amplitude");
            if (d.kind == DitherKind::Sinusoid || d.kind == DitherKind::DecayingSinusoid)
                d.omegas = kv.get_list("dither.omega");
            if (d.kind == DitherKind::DecayingSinusoid || d.kind == DitherKind::ExpDecay)
                d.tau = kv.get_double("dither.tau");
            cfg.dither = std::move(d);
        } else {
            cfg.dither = default_dither(cfg.rcac.input_dim);
        }
        s.rcesc = std::move(cfg);
    } else {
        throw ConfigError("controller.type", "unknown controller type '" + type + "'");
    }

    if (kv.has("esc_baseline.a")) s.esc_baseline = parse_esc(kv, "esc_baseline");

    kv.check_all_used();
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open scenario file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    auto list = [&](const Eigen::VectorXd& v) {
        std::string text;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (i) text += ", ";
            text += fmt(v[i]);
        }
        return text;
    };
    auto dlist = [&](const std::vector<double>& v) {
        std::string text;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) text += ", ";
            text += fmt(v[i]);
        }
        return text;
    };

    out << "name = " << s.name << "\n\n[plant]\n";
    if (s.van_der_pol) {
        out << "kind = van_der_pol\n";
        out << "x0 = " << fmt(s.x0[0]) << ", " << fmt(s.x0[1]) << "\n";
        out << "window_len = " << s.window_len << "\n";
    } else {
        out << "kind = "
            << (s.map.kind == MapKind::SisoQuadratic ? "siso_quadratic" : "miso_quadratic")
            << "\n";
        out << "reference = " << list(s.map.reference.initial) << "\n";
        if (!s.map.reference.switches.empty()) {
            out << "reference_switch_time = " << fmt(s.map.reference.switches[0].after_time)
                << "\n";
            out << "reference_after = " << list(s.map.reference.switches[0].value) << "\n";
        }
    }

    out << "\n[controller]\n";
    switch (s.controller) {
        case ControllerType::Constant:
            out << "type = constant\n";
            out << "value = " << list(s.constant_value) << "\n";
            break;
        case ControllerType::Esc:
            out << "type = esc\n";
            out << "a = " << fmt(s.esc.amplitude) << "\n";
            out << "k_esc = " << fmt(s.esc.gain) << "\n";
            out << "omega = " << dlist(s.esc.omegas) << "\n";
            break;
        case ControllerType::Rcesc: {
            const auto& cfg = s.rcesc;
            out << "type = rcesc\n";
            out << "structure = " << structure_name(cfg.rcac.structure) << "\n";
            if (!cfg.rcac.structure.pid)
                out << "l_c = " << cfg.rcac.structure.window << "\n";
            out << "r_u = " << fmt(cfg.rcac.control_weight) << "\n";
            out << "p0 = " << fmt(cfg.rcac.initial_covariance) << "\n";
            out << "nu = " << fmt(cfg.normalization) << "\n";
            out << "eps = " << fmt(cfg.gradient_floor) << "\n";
            out << "kf_q = " << fmt(cfg.kf.process_noise[0]) << "\n";
            out << "kf_r = " << fmt(cfg.kf.measurement_noise[0]) << "\n";
            out << "kf_p0 = " << fmt(cfg.kf.initial_covariance[0]) << "\n";
            out << "lags = ";
            for (size_t i = 0; i < cfg.kf.lags.size(); ++i)
                out << (i ? ", " : "") << cfg.kf.lags[i];
            out << "\n";
            break;
        }
    }

    if (s.controller == ControllerType::Rcesc) {
        const auto& d = s.rcesc.dither;
        out << "\n[dither]\n";
        out << "kind = " << dither_kind_name(d.kind) << "\n";
        if (d.kind != DitherKind::None) out << "amplitude = " << fmt(d.amplitude) << "\n";
        if (d.kind == DitherKind::Sinusoid || d.kind == DitherKind::DecayingSinusoid)
            out << "omega = " << dlist(d.omegas) << "\n";
        if (d.kind == DitherKind::DecayingSinusoid || d.kind == DitherKind::ExpDecay)
            out << "tau = " << fmt(d.tau) << "\n";
    }

    if (s.esc_baseline) {
        out << "\n[esc_baseline]\n";
        out << "a = " << fmt(s.esc_baseline->amplitude) << "\n";
        out << "k_esc = " << fmt(s.esc_baseline->gain) << "\n";
        out << "omega = " << dlist(s.esc_baseline->omegas) << "\n";
    }

    out << "\n[sim]\n";
    out << "t_s = " << fmt(s.sample_time) << "\n";
    out << "horizon = " << s.horizon << "\n";
    out << "substeps = " << s.substeps << "\n";
    out << "esc_substeps = " << s.esc_substeps << "\n";
    return out.str();
}

namespace {

Scenario make_example1() {
    Scenario s;
    s.name = "example1";
    s.van_der_pol = false;
    s.map.kind = MapKind::SisoQuadratic;
    s.map.reference.initial = Eigen::VectorXd::Constant(1, 1.0);
    s.map.reference.switches.push_back({500.0, Eigen::VectorXd::Constant(1, 5.0)});
    s.controller = ControllerType::Rcesc;
    s.sample_time = 1.0;
    s.horizon = 1000;
    s.substeps = 1;
    s.esc_substeps = 50;

    RcescConfig cfg;
    cfg.sample_time = 1.0;
    cfg.rcac.structure.pid = true;
    cfg.rcac.structure.use_p = false;
    cfg.rcac.structure.use_i = true;
    cfg.rcac.structure.use_d = false;
    cfg.rcac.input_dim = 1;
    cfg.rcac.perf_dim = 1;
    cfg.rcac.target_window = 1;
    cfg.rcac.control_weight = 0.05;
    cfg.rcac.initial_covariance = 0.9;
    cfg.normalization = 0.9;
    cfg.kf.input_dim = 1;
    cfg.kf.cost_dim = 1;
    cfg.kf.process_noise = {0.1};
    cfg.kf.measurement_noise = {10.0};
    cfg.kf.initial_covariance = {1e-3};
    cfg.kf.lags = {3};
    cfg.dither.kind = DitherKind::DecayingSinusoid;
    cfg.dither.amplitude = 0.15;
    cfg.dither.omegas = {0.1};
    cfg.dither.tau = 150.0;
    s.rcesc = cfg;

    EscConfig esc;
    esc.amplitude = 0.2;
    esc.gain = 0.05;
    esc.omegas = {6.0};
    s.esc_baseline = esc;
    return s;
}

Scenario make_example2() {
    Scenario s;
    s.name = "example2";
    s.van_der_pol = false;
    s.map.kind = MapKind::MisoQuadratic;
    s.map.reference.initial = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
    s.map.reference.switches.push_back(
        {500.0, (Eigen::VectorXd(2) << -1.0, -2.0).finished()});
    s.controller = ControllerType::Rcesc;
    s.sample_time = 1.0;
    s.horizon = 1000;
    s.substeps = 1;
    s.esc_substeps = 200;

    RcescConfig cfg;
    cfg.sample_time = 1.0;
    cfg.rcac.structure.pid = false;
    cfg.rcac.structure.window = 5;
    cfg.rcac.input_dim = 2;
    cfg.rcac.perf_dim = 1;
    cfg.rcac.target_window = 2;
    cfg.rcac.control_weight = 0.05;
    cfg.rcac.initial_covariance = 0.1;
    cfg.normalization = 0.2;
    cfg.kf.input_dim = 2;
    cfg.kf.cost_dim = 1;
    cfg.kf.process_noise = {0.1};
    cfg.kf.measurement_noise = {0.1};
    cfg.kf.initial_covariance = {1e-4};
    cfg.kf.lags = {2, 6};
    cfg.dither.kind = DitherKind::DecayingSinusoid;
    cfg.dither.amplitude = 0.05;
    cfg.dither.omegas = {2.2, 2.9};
    cfg.dither.tau = 150.0;
    s.rcesc = cfg;

    EscConfig esc;
    esc.amplitude = 0.3;
    esc.gain = 0.05;
    esc.omegas = {30.0, 50.0};
    s.esc_baseline = esc;
    return s;
}

Scenario make_example3() {
    Scenario s;
    s.name = "example3";
    s.van_der_pol = true;
    s.x0 = Eigen::Vector2d(2.0, 0.0);
    s.window_len = 10;
    s.controller = ControllerType::Rcesc;
    s.sample_time = 5.0;
    s.horizon = 800;
    s.substeps = 2000;
    s.esc_substeps = 2000;

    RcescConfig cfg;
    cfg.sample_time = 5.0;
    cfg.rcac.structure.pid = false;
    cfg.rcac.structure.window = 5;
    cfg.rcac.input_dim = 2;
    cfg.rcac.perf_dim = 1;
    cfg.rcac.target_window = 2;
    cfg.rcac.control_weight = 0.01;
    cfg.rcac.initial_covariance = 0.1;
    cfg.normalization = 0.2;
    cfg.kf.input_dim = 2;
    cfg.kf.cost_dim = 1;
    cfg.kf.process_noise = {0.01};
    cfg.kf.measurement_noise = {1.0};
    cfg.kf.initial_covariance = {1e-4};
    cfg.kf.lags = {2, 6};
    cfg.dither.kind = DitherKind::DecayingSinusoid;
    cfg.dither.amplitude = 0.294;
    cfg.dither.omegas = {0.0108, 0.0179};
    cfg.dither.tau = 470.0;
    s.rcesc = cfg;

    EscConfig esc;
    esc.amplitude = 0.2;
    esc.gain = 5.0;
    esc.omegas = {3.0, 5.0};
    s.esc_baseline = esc;
    return s;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = {"example1", "example2", "example3"};
    return names;
}

bool is_builtin_scenario(const std::string& name) {
    const auto& names = builtin_scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(const std::string& name) {
    if (name == "example1") return make_example1();
    if (name == "example2") return make_example2();
    if (name == "example3") return make_example3();
    throw ConfigError("name", "unknown built-in scenario '" + name + "'");
}

namespace {

PlantHandle make_plant(const Scenario& s) {
    if (s.van_der_pol) return PlantHandle{VanDerPolPlant(s.x0, s.window_len)};
    return PlantHandle{s.map};
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
    s.validate();
    PlantHandle plant = make_plant(s);
    switch (s.controller) {
        case ControllerType::Constant: {
            const Eigen::VectorXd value = s.constant_value;
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(value.size());
            StepFn fn = [&](const Eigen::VectorXd&, long) {
                return ControllerSignals{value, value, zero, std::nullopt, std::nullopt,
                                         std::nullopt};
            };
            return run_loop(plant, fn, s.sample_time, s.horizon, s.substeps);
        }
        case ControllerType::Esc:
            return run_esc_loop(plant, s.esc, s.sample_time, s.horizon, s.esc_substeps);
        case ControllerType::Rcesc: {
            RcescConfig cfg = s.rcesc;
            cfg.sample_time = s.sample_time;
            RcescController controller(cfg);
            StepFn fn = [&controller](const Eigen::VectorXd& cost, long k) {
                auto out = controller.step(cost, k);
                return ControllerSignals{std::move(out.u), std::move(out.du),
                                         std::move(out.dither), std::move(out.z),
                                         controller.rcac().theta(), std::move(out.gradient)};
            };
            return run_loop(plant, fn, s.sample_time, s.horizon, s.substeps);
        }
    }
    throw ConfigError("controller.type", "unhandled controller type");
}

RunResult run_scenario_esc_baseline(const Scenario& s) {
    s.validate();
    if (!s.esc_baseline && s.controller != ControllerType::Esc)
        throw ConfigError("esc_baseline", "scenario has no classic-ESC configuration");
    const EscConfig& cfg = s.esc_baseline ? *s.esc_baseline : s.esc;
    PlantHandle plant = make_plant(s);
    return run_esc_loop(plant, cfg, s.sample_time, s.horizon, s.esc_substeps);
}

}  // namespace esctk
