#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pointing/model.hpp"

namespace pointing::mpc {

struct MpcConfig {
    int horizon = 10;   ///< N, number of free inputs
    double Q = 1.0;     ///< tracking weight per predicted sample
    double R = 1e-6;    ///< input weight per step
    double T = 0.01;

    bool operator==(const MpcConfig&) const = default;
};

void validate(const MpcConfig& config);

/// Raised when the stacked least-squares problem is rank deficient.
class MpcError : public std::runtime_error {
public:
    MpcError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}

    /// Estimated condition number of the stacked system at the time of failure.
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/**
 * Unconstrained receding-horizon controller on the Euler-discretized plant (d = 0).
 *
 * Input u[n+k] first reaches the angle at x1[n+k+2], so the N free inputs act on the
 * predicted angles x1[n+2 .. n+N+1]. The reference window holds r[n+1 .. n+N+1]; the cost is
 *   sum_{k=1}^{N+1} Q (x1[n+k] - r[n+k])^2 + sum_{k=0}^{N-1} R u[n+k]^2
 * and the first optimal input is applied. Prediction matrices and the factorization are built
 * once per (params, config) and reused.
 */
class MpcController {
public:
    MpcController(const model::PlantParams& params, const MpcConfig& config);

    /// ref_window must hold at least N+1 samples; extra samples are ignored.
    double control(const model::PlantState& state, std::span<const double> ref_window) const;

    /// Full optimal input sequence for the current state (length N).
    Eigen::VectorXd plan(const model::PlantState& state, std::span<const double> ref_window) const;

    /// Predicted x1[n+1 .. n+N+1] for a given input sequence.
    Eigen::VectorXd predict(const model::PlantState& state, const Eigen::VectorXd& inputs) const;

    const MpcConfig& config() const noexcept { return config_; }

    /// Pivot-ratio condition estimate of the stacked least-squares matrix.
    double condition() const;

private:
    MpcConfig config_;
    Eigen::MatrixXd free_response_;  // (N+1) x 2, maps x[n] to x1[n+1..n+N+1]
    Eigen::MatrixXd forced_response_;  // (N+1) x N, maps inputs to x1[n+1..n+N+1]
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> solver_;
};

/// Convenience wrapper building a controller for a single evaluation.
double mpc_control(const model::PlantState& state, std::span<const double> ref_window,
                   const model::PlantParams& params, const MpcConfig& config);

}  // namespace pointing::mpc
