#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointing/model.hpp"

namespace pointing::sysid {

/// Uniformly sampled input/output record of one axis.
struct IoDataset {
    std::vector<double> u;
    std::vector<double> y;
    double T = 0.0;
};

/// Throws std::invalid_argument unless u and y have equal length >= 10 and T > 0.
void validate(const IoDataset& data);

struct SolverOptions {
    int max_iterations = 200;
    double relative_cost_tolerance = 1e-10;
    double gradient_tolerance = 1e-8;
    double initial_damping = 1e-3;
    double fd_relative_step = 1e-6;
};

struct FitResult {
    model::PlantParams params;
    double nrmse = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual_norm = 0.0;
    /// Residual norm of every accepted iterate, starting with the initial guess.
    std::vector<double> accepted_residuals;
};

enum class NrmseForm {
    Standard,       ///< 1 - ||y - yhat|| / ||y - mean(y)||
    PerSample,   ///< numerator RMS divided by sqrt(Ns), denominator left as a plain norm
};

/// Fit metric in (-inf, 1]; 1 is a perfect fit. Throws std::domain_error for a constant
/// actual series and std::invalid_argument for mismatched or empty inputs.
double nrmse(std::span<const double> actual, std::span<const double> predicted,
             NrmseForm form = NrmseForm::Standard);

/**
 * Simulation-error least squares for (b0, a1, a2).
 *
 * Levenberg-Marquardt over log-parameters with a central-difference Jacobian. Trial points whose
 * simulation goes non-finite are rejected like any cost increase.
 */
FitResult identify(const IoDataset& data, const model::PlantParams& initial_guess,
                   const SolverOptions& options = {});

/// Logarithmic chirp from f0 to f1 Hz over the record plus a square step component.
std::vector<double> excitation_signal(std::size_t samples, double T, double f0 = 0.5,
                                      double f1 = 20.0);

/// Noiseless (noise_fraction = 0) or noisy dataset generated from known parameters. Noise is
/// uniform with amplitude noise_fraction * (max(y) - min(y)).
IoDataset synthesize_dataset(const model::PlantParams& params, std::size_t samples, double T,
                             double noise_fraction = 0.0, std::uint64_t seed = 1);

/// Malformed CSV content. row() is the 1-based line number in the file (header is line 1).
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Reads header `t,u,y`, one row per sample, with uniform spacing (max deviation 1e-9 T).
IoDataset read_dataset_csv(std::istream& in);
IoDataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const IoDataset& data);

}  // namespace pointing::sysid
