#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pointing/model.hpp"

namespace pointing::sliding {

/// Discrete FTSM tuning. Defaults are the reference gain set used throughout the test suite.
struct FtsmGains {
    double alpha = 1.0;  ///< linear surface gain on sigma1 [1/s]
    double beta = 2.0;   ///< gain on odd_pow(sigma1, q1/p1)
    int q1 = 7;          ///< odd, q1 < p1
    int p1 = 9;          ///< odd
    double K = 10.0;     ///< switching gain
    double Phi = 70.0;   ///< linear reaching gain, 0 < Phi < 1/T
    double T = 0.01;     ///< sampling period [s]

    bool operator==(const FtsmGains&) const = default;
};

/// Throws std::invalid_argument when the gains leave the stable region.
void validate(const FtsmGains& gains);

/// Checks the same region as validate() but lets alpha and Phi be zero (TSM special case).
void validate_tsm(const FtsmGains& gains);

/// Current and two look-ahead reference samples r[n], r[n+1], r[n+2].
struct ReferenceWindow {
    double r0 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

struct SurfaceSample {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double delta_sigma1 = 0.0;
};

/// How the derivative of the terminal term beta*odd_pow(sigma1, q1/p1) enters the control law.
enum class TerminalDerivative {
    /// Exact forward difference of odd_pow(sigma1) over one sample. Makes the closed-loop
    /// surface recursion exact and has no singularity at sigma1 = 0.
    ForwardDifference,
    /// beta*(q1/p1)*|sigma1|^((q1-p1)/p1)*delta_sigma1, saturated and zeroed near sigma1 = 0.
    Linearized,
};

struct FtsmOptions {
    TerminalDerivative terminal = TerminalDerivative::ForwardDifference;
    double max_terminal_term = 1e4;  ///< |linearized terminal term| cap [deg/s^2]
    double singular_band = 1e-12;    ///< linearized term is 0 for |sigma1| below this
};

/// sign(x) * |x|^(q/p) for odd positive q, p. Odd in x and continuous at 0.
double odd_pow(double x, int q, int p) noexcept;

/// Signum with sign(0) = 0.
double sign(double x) noexcept;

SurfaceSample compute_surfaces(const model::PlantState& state, const ReferenceWindow& ref,
                               const FtsmGains& gains) noexcept;

/**
 * Discrete-time FTSM control input.
 *
 * u = -u0 / b0 with
 *   u0 = -a2 x1 - a1 x2 - D2r + alpha*Dsigma1 + beta*D[odd_pow(sigma1)] + Phi*sigma2
 *        + K*sign(sigma2)
 * where D is the forward difference operator. On the disturbance-free Euler plant the
 * surface then obeys sigma2[n+1] = (1 - Phi T) sigma2[n] - K T sign(sigma2[n]).
 *
 * When prev_sigma1 is given, Dsigma1 is estimated from the sigma1 history instead of x2.
 */
double ftsm_control(const model::PlantState& state, const ReferenceWindow& ref,
                    const model::PlantParams& params, const FtsmGains& gains,
                    std::optional<double> prev_sigma1 = std::nullopt,
                    const FtsmOptions& options = {});

/// Discrete TSM baseline: the FTSM law with alpha = 0 and Phi = 0, giving
/// sigma2[n+1] = sigma2[n] - K T sign(sigma2[n]) on the nominal plant.
double tsm_control(const model::PlantState& state, const ReferenceWindow& ref,
                   const model::PlantParams& params, const FtsmGains& gains,
                   const FtsmOptions& options = {});

/// The surface gains TSM actually uses (alpha and Phi zeroed).
FtsmGains tsm_gains(FtsmGains gains) noexcept;

/// Continuous-time FTSM law with exact reference derivatives. The terminal factor is
/// regularized the same way as TerminalDerivative::Linearized.
double continuous_ftsm_control(const model::PlantState& state, double r, double r_dot,
                               double r_ddot, const model::PlantParams& params,
                               const FtsmGains& gains, const FtsmOptions& options = {});

struct SarpturkReport {
    /// decreasing[n] is |sigma[n+1]| < |sigma[n]|.
    std::vector<bool> decreasing;
    double band_radius = 0.0;
    /// First n with |sigma[n]| <= band_radius.
    std::optional<std::size_t> band_entry;
    /// Failed checks among steps n < band_entry (all steps if the band is never entered).
    std::size_t violations_before_entry = 0;
    std::size_t violations_total = 0;
    /// max |sigma[n]| for n >= band_entry; 0 if never entered.
    double post_entry_max = 0.0;
};

/// 2 K T, the edge of the transient region in the surface slope analysis.
double default_band_radius(const FtsmGains& gains) noexcept;

/// Evaluates |sigma[n+1]| < |sigma[n]| along a surface series. Throws on fewer than 2 samples.
SarpturkReport sarpturk_check(std::span<const double> sigma2, double band_radius);

}  // namespace pointing::sliding
