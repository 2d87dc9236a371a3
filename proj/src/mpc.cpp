#include "pointing/mpc.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace pointing::mpc {
namespace {

double condition_estimate(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
    if (diag.size() == 0) return 0.0;
    const double smallest = diag.minCoeff();
    return smallest > 0.0 ? diag.maxCoeff() / smallest : std::numeric_limits<double>::infinity();
}

}  // namespace

void validate(const MpcConfig& c) {
    if (c.horizon < 1) throw std::invalid_argument("MPC horizon must be >= 1");
    if (!(c.Q > 0.0) || !std::isfinite(c.Q)) throw std::invalid_argument("MPC Q must be > 0");
    if (!(c.R > 0.0) || !std::isfinite(c.R)) throw std::invalid_argument("MPC R must be > 0");
    if (!(c.T > 0.0) || !std::isfinite(c.T)) throw std::invalid_argument("MPC T must be > 0");
}

MpcController::MpcController(const model::PlantParams& params, const MpcConfig& config)
    : config_(config) {
    model::validate(params);
    validate(config);

    const int n = config.horizon;
    const double T = config.T;
    Eigen::Matrix2d A;
    A << 1.0, T, -params.a2 * T, 1.0 - params.a1 * T;
    const Eigen::Vector2d B(0.0, params.b0 * T);

    // powers[k] = A^k for k = 0..N+1
    std::vector<Eigen::Matrix2d> powers(n + 2);
    powers[0].setIdentity();
    for (int k = 1; k <= n + 1; ++k) powers[k] = A * powers[k - 1];

    free_response_.resize(n + 1, 2);
    forced_response_.setZero(n + 1, n);
    for (int k = 1; k <= n + 1; ++k) {
        free_response_.row(k - 1) = powers[k].row(0);
        for (int j = 0; j < std::min(k, n); ++j) {
            forced_response_(k - 1, j) = (powers[k - 1 - j] * B)(0);
        }
    }

    Eigen::MatrixXd stacked(2 * n + 1, n);
    stacked.topRows(n + 1) = std::sqrt(config.Q) * forced_response_;
    stacked.bottomRows(n) = std::sqrt(config.R) * Eigen::MatrixXd::Identity(n, n);
    solver_.compute(stacked);
    if (solver_.rank() < n) {
        const double cond = condition_estimate(solver_);
        throw MpcError("MPC normal equations are rank deficient (condition ~" +
                           std::to_string(cond) + "); increase R or shorten the horizon",
                       cond);
    }
}

Eigen::VectorXd MpcController::plan(const model::PlantState& state,
                                    std::span<const double> ref_window) const {
    const int n = config_.horizon;
    if (ref_window.size() < static_cast<std::size_t>(n + 1)) {
        throw std::invalid_argument("MPC reference window needs N+1 samples");
    }
    const Eigen::Vector2d x(state.x1, state.x2);
    const Eigen::Map<const Eigen::VectorXd> ref(ref_window.data(), n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n + 1);
    rhs.head(n + 1) = std::sqrt(config_.Q) * (ref - free_response_ * x);
    return solver_.solve(rhs);
}

double MpcController::control(const model::PlantState& state,
                              std::span<const double> ref_window) const {
    return plan(state, ref_window)(0);
}

Eigen::VectorXd MpcController::predict(const model::PlantState& state,
                                       const Eigen::VectorXd& inputs) const {
    const Eigen::Vector2d x(state.x1, state.x2);
    return free_response_ * x + forced_response_ * inputs;
}

double MpcController::condition() const { return condition_estimate(solver_); }

double mpc_control(const model::PlantState& state, std::span<const double> ref_window,
                   const model::PlantParams& params, const MpcConfig& config) {
    return MpcController(params, config).control(state, ref_window);
}

}  // namespace pointing::mpc
