#include "esctk/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "esctk/errors.hpp"

namespace esctk {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

}  // namespace

int SimulationTrace::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

double SimulationTrace::at(const std::string& name, long row) const {
    const int c = column_index(name);
    if (c < 0) throw ConfigError("column", "no column named " + name);
    return data[static_cast<size_t>(c)][static_cast<size_t>(row)];
}

SummaryReport summarize(const SimulationTrace& trace) {
    SummaryReport report;
    const long n = trace.rows();
    if (n == 0) return report;

    std::vector<int> cost_cols, u_cols, d_cols;
    for (size_t c = 0; c < trace.columns.size(); ++c) {
        const std::string& name = trace.columns[c];
        if (starts_with(name, "J_")) cost_cols.push_back(static_cast<int>(c));
        if (starts_with(name, "u_")) u_cols.push_back(static_cast<int>(c));
        if (starts_with(name, "d_")) d_cols.push_back(static_cast<int>(c));
    }

    auto total_cost = [&](long k) {
        double s = 0.0;
        for (int c : cost_cols) s += trace.data[c][k];
        return s;
    };

    report.terminal_cost = total_cost(n - 1);
    for (long k = 0; k < n; ++k) {
        const double j = total_cost(k);
        if (!report.time_below_1e1 && j < 1e-1) report.time_below_1e1 = trace.data[0][k];
        if (!report.time_below_1e2 && j < 1e-2) {
            report.time_below_1e2 = trace.data[0][k];
            break;
        }
    }

    const long window_start = n - std::max<long>(1, n / 10);
    for (int c : u_cols) {
        double lo = trace.data[c][window_start], hi = lo;
        for (long k = window_start; k < n; ++k) {
            lo = std::min(lo, trace.data[c][k]);
            hi = std::max(hi, trace.data[c][k]);
        }
        report.u_peak_to_peak.push_back(hi - lo);
    }
    for (int c : d_cols)
        for (long k = window_start; k < n; ++k)
            report.dither_max_abs = std::max(report.dither_max_abs,
                                             std::abs(trace.data[c][k]));
    return report;
}

std::string format_summary(const std::string& scenario, const std::string& controller,
                           const SummaryReport& report) {
    std::ostringstream out;
    out << "scenario: " << scenario << "\n";
    out << "controller: " << controller << "\n";
    out << "terminal_cost: " << format_value(report.terminal_cost) << "\n";
    out << "time_below_1e-1_s: "
        << (report.time_below_1e1 ? format_value(*report.time_below_1e1) : "never") << "\n";
    out << "time_below_1e-2_s: "
        << (report.time_below_1e2 ? format_value(*report.time_below_1e2) : "never") << "\n";
    out << "u_peak_to_peak_final10pct:";
    for (double v : report.u_peak_to_peak) out << " " << format_value(v);
    out << "\n";
    out << "dither_max_abs_final10pct: " << format_value(report.dither_max_abs) << "\n";
    return out.str();
}

void export_csv(const SimulationTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    for (size_t c = 0; c < trace.columns.size(); ++c) {
        if (c) out << ',';
        out << trace.columns[c];
    }
    out << '\n';
    const long n = trace.rows();
    for (long k = 0; k < n; ++k) {
        for (size_t c = 0; c < trace.columns.size(); ++c) {
            if (c) out << ',';
            out << format_value(trace.data[c][k]);
        }
        out << '\n';
    }
    if (trace.error_footer) out << "# " << *trace.error_footer << '\n';
    if (!out) throw IoError(path, "write failed");
}

SimulationTrace import_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    SimulationTrace trace;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path, "missing header");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) trace.columns.push_back(cell);
    trace.data.assign(trace.columns.size(), {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            trace.error_footer = line.substr(line.find_first_not_of("# "));
            continue;
        }
        std::stringstream row(line);
        size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= trace.columns.size()) throw IoError(path, "row wider than header");
            trace.data[c++].push_back(std::stod(cell));
        }
        if (c != trace.columns.size()) throw IoError(path, "row narrower than header");
    }
    return trace;
}

}  // namespace esctk
