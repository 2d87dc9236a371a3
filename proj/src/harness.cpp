#include "pointing/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace pointing::harness {
namespace {

std::string format_number(double v, int precision = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

}  // namespace

std::string to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Ftsm: return "ftsm";
        case ControllerKind::Tsm: return "tsm";
        case ControllerKind::Mpc: return "mpc";
    }
    return "unknown";
}

std::string to_string(Axis axis) { return axis == Axis::Elevation ? "elevation" : "azimuth"; }

ControllerKind parse_controller(const std::string& text) {
    if (text == "ftsm") return ControllerKind::Ftsm;
    if (text == "tsm") return ControllerKind::Tsm;
    if (text == "mpc") return ControllerKind::Mpc;
    throw std::invalid_argument("unknown controller '" + text + "' (expected ftsm, tsm or mpc)");
}

double ReferenceSpec::sample(std::size_t n, double T) const {
    const double t = static_cast<double>(n) * T;
    switch (kind) {
        case ReferenceKind::Step:
            return t + 1e-9 * T >= start ? amplitude : 0.0;
        case ReferenceKind::Sinusoid:
            return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
        case ReferenceKind::Custom: {
            if (series.empty()) return 0.0;
            if (n < series.size()) return series[n];
            const double last = series.back();
            if (series.size() == 1) return last;
            const double slope = last - series[series.size() - 2];
            return last + static_cast<double>(n - (series.size() - 1)) * slope;
        }
    }
    return 0.0;
}

std::size_t step_count(const ScenarioConfig& config) {
    if (!(config.T > 0.0) || !(config.duration > 0.0)) {
        throw std::invalid_argument("duration and T must be positive");
    }
    const double ratio = config.duration / config.T;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
        throw std::invalid_argument("duration must be an integer multiple of T");
    }
    return static_cast<std::size_t>(rounded);
}

void validate(const ScenarioConfig& config) {
    step_count(config);
    model::validate(config.elevation);
    model::validate(config.azimuth);
    model::validate(config.disturbance);
    if (!config.initial.finite()) throw std::invalid_argument("initial state must be finite");

    sliding::FtsmGains gains = config.gains;
    gains.T = config.T;
    switch (config.controller) {
        case ControllerKind::Ftsm: sliding::validate(gains); break;
        case ControllerKind::Tsm: sliding::validate_tsm(sliding::tsm_gains(gains)); break;
        case ControllerKind::Mpc: {
            mpc::MpcConfig m = config.mpc;
            m.T = config.T;
            mpc::validate(m);
            break;
        }
    }
    const auto& ref = config.reference;
    if (!std::isfinite(ref.amplitude) || !std::isfinite(ref.start) ||
        !std::isfinite(ref.frequency)) {
        throw std::invalid_argument("reference parameters must be finite");
    }
    if (ref.kind == ReferenceKind::Custom && ref.series.empty()) {
        throw std::invalid_argument("custom reference needs at least one sample");
    }
}

std::vector<double> Trace::sigma2() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(rec.sigma2);
    return out;
}

SimulationDiverged::SimulationDiverged(std::size_t step, Trace partial)
    : std::runtime_error("simulation diverged at step " + std::to_string(step)),
      step_(step),
      partial_(std::move(partial)) {}

Trace run_scenario(const ScenarioConfig& config, Axis axis) {
    validate(config);
    const std::size_t steps = step_count(config);
    const double T = config.T;
    const model::PlantParams& params = config.plant(axis);

    sliding::FtsmGains gains = config.gains;
    gains.T = T;
    const sliding::FtsmGains surface_gains =
        config.controller == ControllerKind::Tsm ? sliding::tsm_gains(gains) : gains;

    std::optional<mpc::MpcController> predictive;
    std::vector<double> window;
    if (config.controller == ControllerKind::Mpc) {
        mpc::MpcConfig m = config.mpc;
        m.T = T;
        predictive.emplace(params, m);
        window.resize(static_cast<std::size_t>(m.horizon) + 1);
    }

    std::seed_seq seed{static_cast<std::uint32_t>(config.seed & 0xffffffffu),
                       static_cast<std::uint32_t>(config.seed >> 32),
                       static_cast<std::uint32_t>(axis == Axis::Elevation ? 0 : 1)};
    model::DisturbanceSource disturbance(config.disturbance, seed);

    Trace trace;
    trace.T = T;
    trace.records.reserve(steps + 1);
    model::PlantState state = config.initial;

    for (std::size_t n = 0; n <= steps; ++n) {
        const sliding::ReferenceWindow ref{config.reference.sample(n, T),
                                           config.reference.sample(n + 1, T),
                                           config.reference.sample(n + 2, T)};
        const sliding::SurfaceSample surface = sliding::compute_surfaces(state, ref, surface_gains);

        double u = 0.0;
        switch (config.controller) {
            case ControllerKind::Ftsm:
                u = sliding::ftsm_control(state, ref, params, gains);
                break;
            case ControllerKind::Tsm:
                u = sliding::tsm_control(state, ref, params, gains);
                break;
            case ControllerKind::Mpc:
                for (std::size_t k = 0; k < window.size(); ++k) {
                    window[k] = config.reference.sample(n + 1 + k, T);
                }
                u = predictive->control(state, window);
                break;
        }
        const double d = disturbance.next();

        if (!std::isfinite(u)) throw SimulationDiverged(n, trace);
        trace.records.push_back({static_cast<double>(n) * T, ref.r0, state.x1, state.x2, u,
                                 surface.sigma1, surface.sigma2, d});
        if (n == steps) break;

        state = model::euler_step(params, state, u, d, T);
        if (!state.finite()) throw SimulationDiverged(n + 1, trace);
    }
    return trace;
}

AxisTraces run_scenario(const ScenarioConfig& config) {
    return {run_scenario(config, Axis::Elevation), run_scenario(config, Axis::Azimuth)};
}

double ise(const Trace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("ise of an empty trace");
    double sum = 0.0;
    for (const auto& rec : trace.records) sum += (rec.x1 - rec.r) * (rec.x1 - rec.r);
    return sum;
}

std::optional<double> settling_time(const Trace& trace, double band_frac) {
    if (trace.records.empty()) throw std::invalid_argument("settling_time of an empty trace");
    const double target = trace.records.back().r;
    double amplitude = std::abs(target - trace.records.front().x1);
    if (amplitude == 0.0) amplitude = std::abs(target);
    const double band = band_frac * amplitude;

    // Walk back from the end to find the last excursion outside the band.
    std::size_t first_inside = trace.records.size();
    for (std::size_t i = trace.records.size(); i-- > 0;) {
        if (std::abs(trace.records[i].x1 - target) > band) break;
        first_inside = i;
    }
    if (first_inside == trace.records.size()) return std::nullopt;
    return trace.records[first_inside].t;
}

MetricsReport metrics(const Trace& trace, const sliding::FtsmGains& gains,
                      const MetricsOptions& options) {
    MetricsReport report;
    report.ise = ise(trace);
    report.settling_time = settling_time(trace, options.band_frac);
    for (const auto& rec : trace.records) {
        if (rec.t + 1e-9 * trace.T < options.steady_start) continue;
        report.max_abs_sigma2_steady = std::max(report.max_abs_sigma2_steady, std::abs(rec.sigma2));
        report.max_abs_error_steady = std::max(report.max_abs_error_steady, std::abs(rec.x1 - rec.r));
    }
    if (trace.records.size() >= 2) {
        const auto sigma2 = trace.sigma2();
        const auto sarpturk = sliding::sarpturk_check(
            sigma2, options.band_radius.value_or(sliding::default_band_radius(gains)));
        report.sarpturk_violations = sarpturk.violations_before_entry;
        report.band_entry = sarpturk.band_entry;
    }
    return report;
}

ComparisonReport compare(const std::vector<ScenarioConfig>& scenarios,
                         const MetricsOptions& options) {
    if (scenarios.size() < 2) throw std::invalid_argument("compare needs at least two scenarios");

    auto run_row = [&options](const ScenarioConfig& config, Axis axis) {
        ComparisonRow row;
        row.scenario = config.name;
        row.controller = config.controller;
        row.axis = axis;
        try {
            sliding::FtsmGains gains = config.gains;
            gains.T = config.T;
            row.metrics = metrics(run_scenario(config, axis), gains, options);
        } catch (const std::exception& e) {
            row.diverged = true;
            row.diagnostic = e.what();
        }
        return row;
    };

    std::vector<std::future<ComparisonRow>> pending;
    for (const auto& config : scenarios) {
        for (const Axis axis : {Axis::Elevation, Axis::Azimuth}) {
            pending.push_back(std::async(std::launch::async, run_row, std::cref(config), axis));
        }
    }
    ComparisonReport report;
    for (auto& f : pending) report.rows.push_back(f.get());

    for (const Axis axis : {Axis::Elevation, Axis::Azimuth}) {
        std::vector<ComparisonRow*> ordered;
        for (auto& row : report.rows) {
            if (row.axis == axis) ordered.push_back(&row);
        }
        std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
            if (a->diverged != b->diverged) return !a->diverged;
            if (a->diverged) return false;
            return a->metrics.ise < b->metrics.ise;
        });
        for (std::size_t i = 0; i < ordered.size(); ++i) ordered[i]->rank = i + 1;
    }
    return report;
}

void ComparisonReport::write_csv(std::ostream& out) const {
    out << "scenario,controller,axis,rank,status,ise,settling_time,max_abs_sigma2_steady,"
           "max_abs_error_steady,sarpturk_violations\n";
    for (const auto& row : rows) {
        out << row.scenario << ',' << to_string(row.controller) << ',' << to_string(row.axis)
            << ',' << row.rank << ',' << (row.diverged ? "diverged" : "ok") << ',';
        if (row.diverged) {
            out << ",,,,\n";
            continue;
        }
        const auto& m = row.metrics;
        out << format_number(m.ise) << ','
            << (m.settling_time ? format_number(*m.settling_time) : "not-settled") << ','
            << format_number(m.max_abs_sigma2_steady) << ','
            << format_number(m.max_abs_error_steady) << ',' << m.sarpturk_violations << '\n';
    }
}

void ComparisonReport::write_table(std::ostream& out) const {
    const std::vector<std::string> header{"rank", "scenario", "controller", "axis", "ISE",
                                          "settling[s]", "|sigma2| ss", "sarpturk"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        const auto& m = row.metrics;
        if (row.diverged) {
            cells.push_back({std::to_string(row.rank), row.scenario, to_string(row.controller),
                             to_string(row.axis), "diverged", "-", "-", "-"});
            continue;
        }
        cells.push_back({std::to_string(row.rank), row.scenario, to_string(row.controller),
                         to_string(row.axis), format_number(m.ise, 6),
                         m.settling_time ? format_number(*m.settling_time, 4) : "not-settled",
                         format_number(m.max_abs_sigma2_steady, 4),
                         std::to_string(m.sarpturk_violations)});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out << std::left << std::setw(static_cast<int>(width[c])) << line[c]
                << (c + 1 < line.size() ? "  " : "\n");
        }
    };
    emit(header);
    for (const auto& line : cells) emit(line);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,r,x1,x2,u,sigma1,sigma2,d\n";
    char buf[512];
    for (const auto& rec : trace.records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.t,
                      rec.r, rec.x1, rec.x2, rec.u, rec.sigma1, rec.sigma2, rec.d);
        out << buf;
    }
}

}  // namespace pointing::harness
