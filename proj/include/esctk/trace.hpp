#pragma once

#include <optional>
#include <string>
#include <vector>

namespace esctk {

// Column-major record of every per-step signal. Column 0 is t_seconds; the
// rest are named <signal>_<index>. All columns have one value per executed
// step; a run that diverged carries a footer naming the failing step.
struct SimulationTrace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[c][k]
    std::optional<std::string> error_footer;

    long rows() const { return data.empty() ? 0 : static_cast<long>(data[0].size()); }
    int column_index(const std::string& name) const;  // -1 when absent
    double at(const std::string& name, long row) const;
};

// Metrics over a trace; recomputable from the CSV alone.
struct SummaryReport {
    double terminal_cost = 0.0;  // sum of J components, last row
    std::optional<double> time_below_1e1;  // first t with total J < 1e-1
    std::optional<double> time_below_1e2;  // ... < 1e-2
    std::vector<double> u_peak_to_peak;    // per input, final 10% of rows
    double dither_max_abs = 0.0;           // over all channels, final 10%
};

SummaryReport summarize(const SimulationTrace& trace);

std::string format_summary(const std::string& scenario, const std::string& controller,
                           const SummaryReport& report);

// Header plus one row per step, every value printed with 17 significant
// digits; rewriting the same trace is byte-identical.
void export_csv(const SimulationTrace& trace, const std::string& path);

SimulationTrace import_csv(const std::string& path);

}  // namespace esctk
