#include "pointing/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pointing::sliding {
namespace {

bool odd_positive(int v) { return v > 0 && v % 2 == 1; }

void validate_common(const FtsmGains& g) {
    if (!odd_positive(g.q1) || !odd_positive(g.p1)) {
        throw std::invalid_argument("q1 and p1 must be odd positive integers");
    }
    if (g.q1 >= g.p1) throw std::invalid_argument("q1/p1 must lie in (0, 1)");
    if (!(g.T > 0.0) || !std::isfinite(g.T)) throw std::invalid_argument("T must be positive");
    if (!(g.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(g.K > 0.0)) throw std::invalid_argument("K must be positive");
}

// Shared body of the discrete FTSM and TSM laws.
double discrete_law(const model::PlantState& state, const ReferenceWindow& ref,
                    const model::PlantParams& params, const FtsmGains& g,
                    std::optional<double> prev_sigma1, const FtsmOptions& options) {
    SurfaceSample s = compute_surfaces(state, ref, g);
    if (prev_sigma1) {
        s.delta_sigma1 = (s.sigma1 - *prev_sigma1) / g.T;
        s.sigma2 = s.delta_sigma1 + g.alpha * s.sigma1 + g.beta * odd_pow(s.sigma1, g.q1, g.p1);
    }
    const double d2r = ((ref.r2 - ref.r1) - (ref.r1 - ref.r0)) / (g.T * g.T);

    double terminal = 0.0;
    switch (options.terminal) {
        case TerminalDerivative::ForwardDifference: {
            // sigma1 one sample ahead is fixed by the Euler update of x1.
            const double sigma1_next = s.sigma1 + g.T * s.delta_sigma1;
            terminal = g.beta *
                       (odd_pow(sigma1_next, g.q1, g.p1) - odd_pow(s.sigma1, g.q1, g.p1)) / g.T;
            break;
        }
        case TerminalDerivative::Linearized: {
            if (std::abs(s.sigma1) >= options.singular_band) {
                const double ratio = static_cast<double>(g.q1) / g.p1;
                terminal = g.beta * ratio * std::pow(std::abs(s.sigma1), ratio - 1.0) *
                           s.delta_sigma1;
                terminal = std::clamp(terminal, -options.max_terminal_term,
                                      options.max_terminal_term);
            }
            break;
        }
    }

    const double u0 = -params.a2 * state.x1 - params.a1 * state.x2 - d2r +
                      g.alpha * s.delta_sigma1 + terminal + g.Phi * s.sigma2 +
                      g.K * sign(s.sigma2);
    return -u0 / params.b0;
}

}  // namespace

void validate(const FtsmGains& g) {
    validate_common(g);
    if (!(g.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(g.Phi > 0.0) || !(g.Phi < 1.0 / g.T)) {
        throw std::invalid_argument("Phi must satisfy 0 < Phi < 1/T");
    }
}

void validate_tsm(const FtsmGains& g) {
    validate_common(g);
    if (g.alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
    if (g.Phi < 0.0 || !(g.Phi < 1.0 / g.T)) {
        throw std::invalid_argument("Phi must satisfy 0 <= Phi < 1/T");
    }
}

double odd_pow(double x, int q, int p) noexcept {
    if (x == 0.0) return 0.0;
    const double magnitude = std::pow(std::abs(x), static_cast<double>(q) / p);
    return x < 0.0 ? -magnitude : magnitude;
}

double sign(double x) noexcept {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return x;  // keeps NaN flowing through
}

SurfaceSample compute_surfaces(const model::PlantState& state, const ReferenceWindow& ref,
                               const FtsmGains& g) noexcept {
    SurfaceSample s;
    s.sigma1 = state.x1 - ref.r0;
    s.delta_sigma1 = state.x2 - (ref.r1 - ref.r0) / g.T;
    s.sigma2 = s.delta_sigma1 + g.alpha * s.sigma1 + g.beta * odd_pow(s.sigma1, g.q1, g.p1);
    return s;
}

double ftsm_control(const model::PlantState& state, const ReferenceWindow& ref,
                    const model::PlantParams& params, const FtsmGains& gains,
                    std::optional<double> prev_sigma1, const FtsmOptions& options) {
    return discrete_law(state, ref, params, gains, prev_sigma1, options);
}

FtsmGains tsm_gains(FtsmGains gains) noexcept {
    gains.alpha = 0.0;
    gains.Phi = 0.0;
    return gains;
}

double tsm_control(const model::PlantState& state, const ReferenceWindow& ref,
                   const model::PlantParams& params, const FtsmGains& gains,
                   const FtsmOptions& options) {
    return discrete_law(state, ref, params, tsm_gains(gains), std::nullopt, options);
}

double continuous_ftsm_control(const model::PlantState& state, double r, double r_dot,
                               double r_ddot, const model::PlantParams& params,
                               const FtsmGains& g, const FtsmOptions& options) {
    const double sigma1 = state.x1 - r;
    const double sigma1_dot = state.x2 - r_dot;
    const double sigma2 = sigma1_dot + g.alpha * sigma1 + g.beta * odd_pow(sigma1, g.q1, g.p1);

    double terminal = 0.0;
    if (std::abs(sigma1) >= options.singular_band) {
        const double ratio = static_cast<double>(g.q1) / g.p1;
        terminal = g.beta * ratio * std::pow(std::abs(sigma1), ratio - 1.0) * sigma1_dot;
        terminal = std::clamp(terminal, -options.max_terminal_term, options.max_terminal_term);
    }

    const double u0 = -params.a2 * state.x1 - params.a1 * state.x2 - r_ddot +
                      g.alpha * sigma1_dot + terminal + g.Phi * sigma2 + g.K * sign(sigma2);
    return -u0 / params.b0;
}

double default_band_radius(const FtsmGains& gains) noexcept { return 2.0 * gains.K * gains.T; }

SarpturkReport sarpturk_check(std::span<const double> sigma2, double band_radius) {
    if (sigma2.size() < 2) throw std::invalid_argument("sarpturk_check needs at least 2 samples");

    SarpturkReport report;
    report.band_radius = band_radius;
    report.decreasing.reserve(sigma2.size() - 1);
    for (std::size_t n = 0; n + 1 < sigma2.size(); ++n) {
        report.decreasing.push_back(std::abs(sigma2[n + 1]) < std::abs(sigma2[n]));
    }
    for (std::size_t n = 0; n < sigma2.size(); ++n) {
        if (std::abs(sigma2[n]) <= band_radius) {
            report.band_entry = n;
            break;
        }
    }

    const std::size_t entry = report.band_entry.value_or(report.decreasing.size());
    for (std::size_t n = 0; n < report.decreasing.size(); ++n) {
        if (report.decreasing[n]) continue;
        ++report.violations_total;
        if (n < entry) ++report.violations_before_entry;
    }
    if (report.band_entry) {
        for (std::size_t n = *report.band_entry; n < sigma2.size(); ++n) {
            report.post_entry_max = std::max(report.post_entry_max, std::abs(sigma2[n]));
        }
    }
    return report;
}

}  // namespace pointing::sliding
