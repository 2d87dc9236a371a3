#include "pointing/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pointing::model {

bool PlantParams::valid() const noexcept {
    return std::isfinite(b0) && std::isfinite(a1) && std::isfinite(a2) && b0 > 0.0 && a1 > 0.0 &&
           a2 > 0.0;
}

void validate(const PlantParams& params) {
    if (!params.valid()) {
        throw std::invalid_argument("plant parameters must be finite and strictly positive (b0=" +
                                    std::to_string(params.b0) + ", a1=" +
                                    std::to_string(params.a1) + ", a2=" +
                                    std::to_string(params.a2) + ")");
    }
}

bool PlantState::finite() const noexcept { return std::isfinite(x1) && std::isfinite(x2); }

StateDerivative continuous_rhs(const PlantParams& params, const PlantState& state, double u,
                               double d) noexcept {
    return {state.x2, -params.a2 * state.x1 - params.a1 * state.x2 + params.b0 * u + d};
}

PlantState euler_step(const PlantParams& params, const PlantState& state, double u, double d,
                      double T) noexcept {
    const StateDerivative rate = continuous_rhs(params, state, u, d);
    return {state.x1 + T * rate.dx1, state.x2 + T * rate.dx2};
}

std::vector<double> transfer_fn_response(const PlantParams& params, std::span<const double> input,
                                         double T) {
    if (input.empty()) throw std::invalid_argument("transfer_fn_response: empty input series");
    std::vector<double> output;
    output.reserve(input.size());
    PlantState state{};
    for (const double u : input) {
        output.push_back(state.x1);
        state = euler_step(params, state, u, 0.0, T);
    }
    return output;
}

void validate(const DisturbanceSpec& spec) {
    if (!std::isfinite(spec.magnitude) || spec.magnitude < 0.0) {
        throw std::invalid_argument("disturbance magnitude must be finite and non-negative");
    }
    if (spec.kind == DisturbanceKind::CustomSeries) {
        for (std::size_t i = 0; i < spec.series.size(); ++i) {
            if (!(std::abs(spec.series[i]) <= spec.magnitude)) {
                throw std::invalid_argument("disturbance sample " + std::to_string(i) +
                                            " exceeds the magnitude bound");
            }
        }
    }
}

DisturbanceSource::DisturbanceSource(DisturbanceSpec spec, std::seed_seq& seed)
    : spec_(std::move(spec)), rng_(seed), uniform_(-spec_.magnitude, spec_.magnitude) {
    validate(spec_);
}

double DisturbanceSource::next() {
    switch (spec_.kind) {
        case DisturbanceKind::None:
            return 0.0;
        case DisturbanceKind::Constant:
            return spec_.magnitude;
        case DisturbanceKind::UniformRandom:
            return spec_.magnitude > 0.0 ? uniform_(rng_) : 0.0;
        case DisturbanceKind::CustomSeries: {
            const std::size_t i = index_++;
            return i < spec_.series.size() ? spec_.series[i] : 0.0;
        }
    }
    return 0.0;
}

}  // namespace pointing::model
