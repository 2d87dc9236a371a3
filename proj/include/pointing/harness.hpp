#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointing/model.hpp"
#include "pointing/mpc.hpp"
#include "pointing/sliding.hpp"

namespace pointing::harness {

enum class ControllerKind { Ftsm, Tsm, Mpc };
enum class Axis { Elevation, Azimuth };

std::string to_string(ControllerKind kind);
std::string to_string(Axis axis);
ControllerKind parse_controller(const std::string& text);

enum class ReferenceKind { Step, Sinusoid, Custom };

struct ReferenceSpec {
    ReferenceKind kind = ReferenceKind::Step;
    double amplitude = 10.0;   ///< [deg]
    double start = 0.0;        ///< step time [s]
    double frequency = 1.0;    ///< sinusoid [Hz]
    std::vector<double> series;  ///< Custom: r[n] on the run grid

    /// r at sample n of a grid with period T. Custom series are extended past their end by
    /// repeating the last available difference.
    double sample(std::size_t n, double T) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ControllerKind controller = ControllerKind::Ftsm;
    sliding::FtsmGains gains;     ///< FTSM, TSM (alpha and Phi ignored), and surface logging
    mpc::MpcConfig mpc;
    ReferenceSpec reference;
    model::DisturbanceSpec disturbance;
    model::PlantParams elevation = model::kElevationPlant;
    model::PlantParams azimuth = model::kAzimuthPlant;
    model::PlantState initial;
    double duration = 3.0;
    double T = 0.01;
    std::uint64_t seed = 1;

    const model::PlantParams& plant(Axis axis) const {
        return axis == Axis::Elevation ? elevation : azimuth;
    }
};

/// Throws std::invalid_argument for an inconsistent configuration.
void validate(const ScenarioConfig& config);

/// duration / T, rejecting non-integer ratios.
std::size_t step_count(const ScenarioConfig& config);

struct TraceRecord {
    double t = 0.0;
    double r = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double u = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double d = 0.0;

    bool operator==(const TraceRecord&) const = default;
};

/// Records at t = n T for n = 0..steps. u[n] and d[n] act over [nT, (n+1)T).
struct Trace {
    double T = 0.0;
    std::vector<TraceRecord> records;

    std::vector<double> sigma2() const;
    bool operator==(const Trace&) const = default;
};

/// Thrown when the state leaves the finite range. Carries the records up to the last finite one.
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(std::size_t step, Trace partial);
    std::size_t step() const noexcept { return step_; }
    const Trace& partial() const noexcept { return partial_; }

private:
    std::size_t step_;
    Trace partial_;
};

Trace run_scenario(const ScenarioConfig& config, Axis axis);

struct AxisTraces {
    Trace elevation;
    Trace azimuth;
};

AxisTraces run_scenario(const ScenarioConfig& config);

/// Plain sum of squared tracking errors over the whole trace.
double ise(const Trace& trace);

/// First time after which |x1 - r_final| <= band_frac * amplitude holds to the end of the trace.
/// amplitude is |r_final - x1[0]|, or |r_final| when the run starts on target.
std::optional<double> settling_time(const Trace& trace, double band_frac = 0.02);

struct MetricsOptions {
    double band_frac = 0.02;
    double steady_start = 0.5;   ///< start of the steady-state window [s]
    std::optional<double> band_radius;  ///< Sarpturk band; defaults to 2 K T
};

struct MetricsReport {
    double ise = 0.0;
    std::optional<double> settling_time;
    double max_abs_sigma2_steady = 0.0;
    double max_abs_error_steady = 0.0;
    std::size_t sarpturk_violations = 0;
    std::optional<std::size_t> band_entry;
};

MetricsReport metrics(const Trace& trace, const sliding::FtsmGains& gains,
                      const MetricsOptions& options = {});

struct ComparisonRow {
    std::string scenario;
    ControllerKind controller = ControllerKind::Ftsm;
    Axis axis = Axis::Elevation;
    bool diverged = false;
    std::string diagnostic;
    MetricsReport metrics;
    std::size_t rank = 0;  ///< 1-based ISE rank within the axis; diverged rows rank last
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;  ///< input order, elevation row then azimuth row

    void write_csv(std::ostream& out) const;
    void write_table(std::ostream& out) const;
};

/// Runs every scenario on both axes, concurrently, and ranks them by ISE per axis.
/// Throws std::invalid_argument for fewer than two scenarios.
ComparisonReport compare(const std::vector<ScenarioConfig>& scenarios,
                         const MetricsOptions& options = {});

/// Header `t,r,x1,x2,u,sigma1,sigma2,d`, 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace pointing::harness
