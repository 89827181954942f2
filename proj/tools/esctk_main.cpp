#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "esctk/errors.hpp"
#include "esctk/scenario.hpp"
#include "esctk/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitIo = 3;

esctk::Scenario resolve(const std::string& target) {
    if (esctk::is_builtin_scenario(target)) return esctk::builtin_scenario(target);
    return esctk::load_scenario(target);
}

std::string controller_label(const esctk::Scenario& s) {
    switch (s.controller) {
        case esctk::ControllerType::Constant: return "constant";
        case esctk::ControllerType::Esc: return "esc";
        case esctk::ControllerType::Rcesc: return "rcesc";
    }
    return "unknown";
}

int run_command(const std::string& target, const std::string& out_dir, bool compare) {
    const esctk::Scenario scenario = resolve(target);

    struct Job {
        std::string label;
        esctk::RunResult result;
    };
    std::vector<Job> jobs;
    jobs.push_back({controller_label(scenario), esctk::run_scenario(scenario)});
    if (compare) {
        if (!scenario.esc_baseline) {
            std::cerr << "error: esc_baseline: scenario has no classic-ESC configuration\n";
            return kExitValidation;
        }
        if (scenario.controller == esctk::ControllerType::Esc) {
            std::cerr << "error: --compare requires a non-ESC main controller\n";
            return kExitValidation;
        }
        jobs.push_back({"esc", esctk::run_scenario_esc_baseline(scenario)});
    }

    std::string summary_text;
    for (const Job& job : jobs)
        summary_text += esctk::format_summary(scenario.name, job.label, job.result.summary);
    std::cout << summary_text;

    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) {
            std::cerr << "error: " << out_dir << ": " << ec.message() << "\n";
            return kExitIo;
        }
        for (const Job& job : jobs) {
            const std::string path =
                out_dir + "/" + scenario.name + "_" + job.label + ".csv";
            esctk::export_csv(job.result.trace, path);
            std::cout << "wrote " << path << "\n";
        }
        const std::string summary_path = out_dir + "/" + scenario.name + "_summary.txt";
        std::ofstream summary_file(summary_path, std::ios::binary);
        if (!summary_file) throw esctk::IoError(summary_path, "cannot open for writing");
        summary_file << summary_text;
        std::cout << "wrote " << summary_path << "\n";
    }

    for (const Job& job : jobs) {
        if (job.result.diverged_at) {
            std::cerr << "error: " << *job.result.trace.error_footer << "\n";
            return kExitDiverged;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampled-data extremum seeking toolkit"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario file or built-in scenario");
    std::string target;
    std::string out_dir;
    bool compare = false;
    run->add_option("scenario", target, "scenario file path or built-in name")->required();
    run->add_option("--out", out_dir, "directory for CSV traces and the summary");
    run->add_flag("--compare", compare,
                  "also run the classic-ESC baseline on the same plant");

    auto* list = app.add_subcommand("list", "list built-in scenarios");

    auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
    std::string validate_target;
    validate->add_option("scenario", validate_target, "scenario file path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : esctk::builtin_scenario_names())
                std::cout << name << "\n";
            return kExitOk;
        }
        if (validate->parsed()) {
            const esctk::Scenario s = esctk::load_scenario(validate_target);
            std::cout << "ok: " << s.name << "\n";
            return kExitOk;
        }
        return run_command(target, out_dir, compare);
    } catch (const esctk::ParseError& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const esctk::ConfigError& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const esctk::DivergedError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitDiverged;
    } catch (const esctk::IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return kExitIo;
    }
}
