// Command-line front end: identify, simulate, compare, version.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pointing/config.hpp"
#include "pointing/harness.hpp"
#include "pointing/sysid.hpp"
#include "pointing/version.hpp"

namespace fs = std::filesystem;
using namespace pointing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    fs::path out = "results";
    bool force = false;
    std::optional<std::uint64_t> seed;
};

class OutputDir {
public:
    OutputDir(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoFailure("cannot create output directory " + dir_.string());
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
        const fs::path path = dir_ / name;
        if (fs::exists(path) && !force_) {
            throw IoFailure(path.string() + " exists; pass --force to overwrite");
        }
        std::ofstream out(path);
        if (!out) throw IoFailure("cannot write " + path.string());
        body(out);
        if (!out) throw IoFailure("write failed for " + path.string());
    }

    // Fails before any file is touched, so a refused run leaves the directory unchanged.
    void check_writable(const std::vector<std::string>& names) const {
        if (force_) return;
        for (const auto& name : names) {
            if (fs::exists(dir_ / name)) {
                throw IoFailure((dir_ / name).string() + " exists; pass --force to overwrite");
            }
        }
    }

private:
    fs::path dir_;
    bool force_;
};

model::PlantParams parse_guess(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    if (values.size() != 3) throw CLI::ValidationError("--guess", "expected b0,a1,a2");
    return {values[0], values[1], values[2]};
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_identify(const GlobalOptions& global, const fs::path& data_path, const std::string& guess,
                 int max_iterations, bool literal) {
    const sysid::IoDataset data = sysid::read_dataset_csv(data_path);
    sysid::SolverOptions options;
    options.max_iterations = max_iterations;
    const sysid::FitResult fit = sysid::identify(data, parse_guess(guess), options);

    double reported_nrmse = fit.nrmse;
    if (literal) {
        const auto predicted = model::transfer_fn_response(fit.params, data.u, data.T);
        reported_nrmse = sysid::nrmse(data.y, predicted, sysid::NrmseForm::PerSample);
    }

    const OutputDir out(global.out, global.force);
    out.write("fit.cfg", [&](std::ostream& os) {
        os << "b0 = " << num(fit.params.b0) << '\n'
           << "a1 = " << num(fit.params.a1) << '\n'
           << "a2 = " << num(fit.params.a2) << '\n'
           << "nrmse = " << num(reported_nrmse) << '\n'
           << "nrmse_form = " << (literal ? "per-sample" : "standard") << '\n'
           << "iterations = " << fit.iterations << '\n'
           << "converged = " << (fit.converged ? "true" : "false") << '\n'
           << "residual_norm = " << num(fit.residual_norm) << '\n';
    });

    std::printf("b0=%.6g a1=%.6g a2=%.6g nrmse=%.6f iterations=%d %s\n", fit.params.b0,
                fit.params.a1, fit.params.a2, reported_nrmse, fit.iterations,
                fit.converged ? "converged" : "NOT CONVERGED");
    return fit.converged ? kExitOk : kExitNumerical;
}

config::Manifest load(const GlobalOptions& global, const fs::path& path) {
    config::Manifest manifest = config::load_manifest(path);
    if (global.seed) manifest.base.seed = *global.seed;
    return manifest;
}

void write_effective(const OutputDir& out, const config::Manifest& manifest) {
    out.write("effective.cfg", [&](std::ostream& os) { config::write_manifest(os, manifest); });
}

int cmd_simulate(const GlobalOptions& global, const fs::path& config_path) {
    const config::Manifest manifest = load(global, config_path);
    const OutputDir out(global.out, global.force);

    std::vector<std::string> names{"effective.cfg", "metrics.csv"};
    for (const auto& scenario : manifest.scenarios()) {
        for (const auto axis : {harness::Axis::Elevation, harness::Axis::Azimuth}) {
            names.push_back(scenario.name + "_" + harness::to_string(scenario.controller) + "_" +
                            harness::to_string(axis) + ".csv");
        }
    }
    out.check_writable(names);
    write_effective(out, manifest);

    harness::ComparisonReport report;
    int status = kExitOk;
    for (const auto& scenario : manifest.scenarios()) {
        for (const auto axis : {harness::Axis::Elevation, harness::Axis::Azimuth}) {
            const std::string file = scenario.name + "_" + harness::to_string(scenario.controller) +
                                     "_" + harness::to_string(axis) + ".csv";
            harness::ComparisonRow row;
            row.scenario = scenario.name;
            row.controller = scenario.controller;
            row.axis = axis;
            row.rank = 1;
            try {
                const harness::Trace trace = harness::run_scenario(scenario, axis);
                out.write(file, [&](std::ostream& os) { harness::write_trace_csv(os, trace); });
                row.metrics = harness::metrics(trace, scenario.gains);
            } catch (const harness::SimulationDiverged& e) {
                out.write(file,
                          [&](std::ostream& os) { harness::write_trace_csv(os, e.partial()); });
                std::fprintf(stderr, "%s/%s/%s: %s\n", scenario.name.c_str(),
                             harness::to_string(scenario.controller).c_str(),
                             harness::to_string(axis).c_str(), e.what());
                row.diverged = true;
                row.diagnostic = e.what();
                status = kExitNumerical;
            }
            report.rows.push_back(row);
        }
    }
    out.write("metrics.csv", [&](std::ostream& os) { report.write_csv(os); });
    report.write_table(std::cout);
    return status;
}

int cmd_compare(const GlobalOptions& global, const fs::path& config_path) {
    const config::Manifest manifest = load(global, config_path);
    if (manifest.controllers.size() < 2) {
        throw CLI::ValidationError("compare", "config must list at least two controllers");
    }
    const OutputDir out(global.out, global.force);
    out.check_writable({"effective.cfg", "comparison.csv", "comparison.txt"});
    write_effective(out, manifest);

    const harness::ComparisonReport report = harness::compare(manifest.scenarios());
    out.write("comparison.csv", [&](std::ostream& os) { report.write_csv(os); });
    out.write("comparison.txt", [&](std::ostream& os) { report.write_table(os); });
    report.write_table(std::cout);
    for (const auto& row : report.rows) {
        if (row.diverged) return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time sliding mode control simulator for mirror-based pointing axes"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions global;
    std::string out_dir = global.out.string();
    std::uint64_t seed = 0;
    app.add_option("--out", out_dir, "Output directory (created if absent)");
    app.add_flag("--force", global.force, "Overwrite existing output files");
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");

    auto* identify = app.add_subcommand("identify", "Fit (b0, a1, a2) to an input/output CSV");
    fs::path data_path;
    std::string guess = "1000,10,1000";
    int max_iterations = 200;
    bool literal = false;
    identify->add_option("--data", data_path, "CSV with header t,u,y")->required();
    identify->add_option("--guess", guess, "Initial b0,a1,a2")->capture_default_str();
    identify->add_option("--max-iter", max_iterations, "Iteration limit")->capture_default_str();
    identify->add_flag("--nrmse-literal", literal, "Report the per-sample (/Ns) NRMSE variant");

    auto* simulate = app.add_subcommand("simulate", "Run a scenario config and write traces");
    fs::path sim_config;
    simulate->add_option("--config", sim_config, "Scenario config file")->required();

    auto* compare = app.add_subcommand("compare", "Rank controllers on a shared scenario");
    fs::path cmp_config;
    compare->add_option("--config", cmp_config, "Scenario config listing controllers")->required();

    app.add_subcommand("version", "Print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    global.out = out_dir;
    if (*seed_opt) global.seed = seed;

    try {
        if (app.got_subcommand("version")) {
            std::printf("pointing %s\n", pointing::kVersion);
            return kExitOk;
        }
        if (*identify) return cmd_identify(global, data_path, guess, max_iterations, literal);
        if (*simulate) return cmd_simulate(global, sim_config);
        if (*compare) return cmd_compare(global, cmp_config);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const sysid::CsvError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return kExitIo;
    } catch (const config::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitIo;
    } catch (const IoFailure& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const mpc::MpcError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
