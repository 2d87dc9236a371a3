#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pointing::model {

/// Second-order axis dynamics H(s) = b0 / (s^2 + a1 s + a2).
struct PlantParams {
    double b0 = 0.0;  ///< input gain [1/s^2]
    double a1 = 0.0;  ///< damping [1/s]
    double a2 = 0.0;  ///< stiffness [1/s^2]

    bool valid() const noexcept;
    bool operator==(const PlantParams&) const = default;
};

/// Identified elevation axis (H11).
inline constexpr PlantParams kElevationPlant{3581.0, 59.6, 3568.0};
/// Identified azimuth axis (H22).
inline constexpr PlantParams kAzimuthPlant{3317.0, 58.6, 3310.0};

/// Throws std::invalid_argument unless every coefficient is finite and positive.
void validate(const PlantParams& params);

struct PlantState {
    double x1 = 0.0;  ///< angle [deg]
    double x2 = 0.0;  ///< angular rate [deg/s]

    bool finite() const noexcept;
    bool operator==(const PlantState&) const = default;
};

struct StateDerivative {
    double dx1 = 0.0;
    double dx2 = 0.0;
};

struct SamplingSpec {
    double T = 0.01;
    std::size_t n_steps = 1;

    bool valid() const noexcept { return T > 0.0 && n_steps >= 1; }
};

/// x1' = x2, x2' = -a2 x1 - a1 x2 + b0 u + d.
StateDerivative continuous_rhs(const PlantParams& params, const PlantState& state, double u,
                               double d) noexcept;

/// One forward-Euler step of continuous_rhs over T. No sub-stepping.
PlantState euler_step(const PlantParams& params, const PlantState& state, double u, double d,
                      double T) noexcept;

/// Zero-initial-condition response of H(s) to a sampled input, returned as the x1 series.
/// output[n] is the angle at t = n*T, so output[0] is always 0.
std::vector<double> transfer_fn_response(const PlantParams& params, std::span<const double> input,
                                         double T);

enum class DisturbanceKind { None, Constant, UniformRandom, CustomSeries };

struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::None;
    double magnitude = 0.0;       ///< bound mu; every sample satisfies |d| <= mu
    std::vector<double> series;   ///< CustomSeries only; zero after the end
};

void validate(const DisturbanceSpec& spec);

/// Per-run disturbance generator. Deterministic in (spec, seed sequence).
class DisturbanceSource {
public:
    DisturbanceSource(DisturbanceSpec spec, std::seed_seq& seed);

    double next();

private:
    DisturbanceSpec spec_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_;
    std::size_t index_ = 0;
};

}  // namespace pointing::model
