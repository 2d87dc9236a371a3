#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointing/harness.hpp"

namespace pointing::config {

/// A scenario template plus the controllers to run it with.
struct Manifest {
    harness::ScenarioConfig base;
    std::vector<harness::ControllerKind> controllers{harness::ControllerKind::Ftsm};

    /// One ScenarioConfig per controller, in listed order.
    std::vector<harness::ScenarioConfig> scenarios() const;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/**
 * Flat `key = value` format. `#` starts a comment. Unknown keys are errors.
 *
 *   name = step_ftsm
 *   controller = ftsm, tsm, mpc
 *   reference = step | sine | custom
 *   reference.amplitude / reference.start / reference.frequency / reference.series
 *   disturbance = none | constant | uniform | series
 *   disturbance.magnitude / disturbance.series
 *   duration, T, seed
 *   gains.alpha, gains.beta, gains.q1, gains.p1, gains.K, gains.Phi
 *   mpc.horizon, mpc.Q, mpc.R
 *   plant.elevation = b0, a1, a2   plant.azimuth = b0, a1, a2
 *   initial.x1, initial.x2
 */
Manifest parse_manifest(std::istream& in);
Manifest load_manifest(const std::filesystem::path& path);

/// Writes every key with round-trip precision so the output re-parses to an identical manifest.
void write_manifest(std::ostream& out, const Manifest& manifest);

}  // namespace pointing::config
