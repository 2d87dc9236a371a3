#include "pointing/sysid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace pointing::sysid {
namespace {

using Vec3 = Eigen::Vector3d;

model::PlantParams from_log(const Vec3& theta) {
    return {std::exp(theta(0)), std::exp(theta(1)), std::exp(theta(2))};
}

// Simulated output and half squared residual norm; cost is +inf when the simulation blows up.
struct Evaluation {
    std::vector<double> prediction;
    double cost = std::numeric_limits<double>::infinity();
};

Evaluation evaluate(const IoDataset& data, const Vec3& theta) {
    Evaluation e;
    e.prediction = model::transfer_fn_response(from_log(theta), data.u, data.T);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        const double r = data.y[i] - e.prediction[i];
        sum += r * r;
    }
    if (std::isfinite(sum)) e.cost = 0.5 * sum;
    return e;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_field(std::string_view field, std::size_t row, const char* name) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw CsvError("row " + std::to_string(row) + ": invalid value for '" + name + "'", row);
    }
    return value;
}

}  // namespace

void validate(const IoDataset& data) {
    if (data.u.size() != data.y.size()) {
        throw std::invalid_argument("dataset input and output lengths differ");
    }
    if (data.u.size() < 10) throw std::invalid_argument("dataset needs at least 10 samples");
    if (!(data.T > 0.0) || !std::isfinite(data.T)) {
        throw std::invalid_argument("dataset sampling period must be positive");
    }
}

double nrmse(std::span<const double> actual, std::span<const double> predicted, NrmseForm form) {
    if (actual.empty() || actual.size() != predicted.size()) {
        throw std::invalid_argument("nrmse needs equal-length non-empty series");
    }
    const double mean =
        std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
    double err = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        err += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        spread += (actual[i] - mean) * (actual[i] - mean);
    }
    if (spread == 0.0) throw std::domain_error("nrmse: actual series is constant");
    if (form == NrmseForm::PerSample) err /= static_cast<double>(actual.size());
    return 1.0 - std::sqrt(err) / std::sqrt(spread);
}

FitResult identify(const IoDataset& data, const model::PlantParams& initial_guess,
                   const SolverOptions& options) {
    validate(data);
    model::validate(initial_guess);

    const auto samples = static_cast<Eigen::Index>(data.y.size());
    const Eigen::Map<const Eigen::VectorXd> measured(data.y.data(), samples);

    Vec3 theta(std::log(initial_guess.b0), std::log(initial_guess.a1), std::log(initial_guess.a2));
    Evaluation current = evaluate(data, theta);
    if (!std::isfinite(current.cost)) {
        throw std::invalid_argument("initial guess produces a non-finite simulation");
    }

    FitResult result;
    result.accepted_residuals.push_back(std::sqrt(2.0 * current.cost));
    double damping = options.initial_damping;
    Eigen::MatrixXd jacobian(samples, 3);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (current.cost == 0.0) {
            result.converged = true;
            break;
        }

        // Columns are filled in a fixed order so results do not depend on scheduling.
        for (int k = 0; k < 3; ++k) {
            const double h = options.fd_relative_step * std::max(1.0, std::abs(theta(k)));
            Vec3 plus = theta;
            Vec3 minus = theta;
            plus(k) += h;
            minus(k) -= h;
            const auto up = model::transfer_fn_response(from_log(plus), data.u, data.T);
            const auto down = model::transfer_fn_response(from_log(minus), data.u, data.T);
            for (Eigen::Index i = 0; i < samples; ++i) {
                jacobian(i, k) = (up[i] - down[i]) / (2.0 * h);
            }
        }
        const Eigen::Map<const Eigen::VectorXd> predicted(current.prediction.data(), samples);
        const Eigen::VectorXd residual = measured - predicted;
        const Eigen::Matrix3d normal = jacobian.transpose() * jacobian;
        const Vec3 rhs = jacobian.transpose() * residual;

        if (!jacobian.allFinite()) break;
        if (rhs.norm() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        bool accepted = false;
        bool stalled = false;
        while (!accepted) {
            Eigen::Matrix3d damped = normal;
            damped.diagonal() += damping * normal.diagonal().cwiseMax(1e-300);
            const Vec3 step = damped.ldlt().solve(rhs);
            Evaluation trial;
            if (step.allFinite()) trial = evaluate(data, theta + step);
            if (trial.cost < current.cost) {
                const double decrease = (current.cost - trial.cost) / current.cost;
                theta += step;
                current = std::move(trial);
                damping = std::max(damping / 10.0, 1e-15);
                accepted = true;
                result.iterations = iter + 1;
                result.accepted_residuals.push_back(std::sqrt(2.0 * current.cost));
                if (decrease < options.relative_cost_tolerance) result.converged = true;
            } else {
                damping *= 10.0;
                if (damping > 1e20) {
                    stalled = true;
                    break;
                }
            }
        }
        if (stalled || result.converged) break;
    }

    result.params = from_log(theta);
    result.residual_norm = std::sqrt(2.0 * current.cost);
    const bool constant = std::all_of(data.y.begin(), data.y.end(),
                                      [&](double v) { return v == data.y.front(); });
    result.nrmse = constant ? (result.residual_norm == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity())
                            : nrmse(data.y, current.prediction);
    return result;
}

std::vector<double> excitation_signal(std::size_t samples, double T, double f0, double f1) {
    const double length = static_cast<double>(samples) * T;
    const double growth = std::log(f1 / f0);
    std::vector<double> u(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) * T;
        const double phase =
            2.0 * std::numbers::pi * f0 * length / growth * (std::exp(growth * t / length) - 1.0);
        const double frac = t / length;
        double step = 0.0;
        if (frac >= 0.125 && frac < 0.375) step = 0.5;
        if (frac >= 0.625 && frac < 0.875) step = -0.5;
        u[i] = 0.6 * std::sin(phase) + step;
    }
    return u;
}

IoDataset synthesize_dataset(const model::PlantParams& params, std::size_t samples, double T,
                             double noise_fraction, std::uint64_t seed) {
    IoDataset data;
    data.T = T;
    data.u = excitation_signal(samples, T);
    data.y = model::transfer_fn_response(params, data.u, T);
    if (noise_fraction > 0.0) {
        const auto [lo, hi] = std::minmax_element(data.y.begin(), data.y.end());
        const double amplitude = noise_fraction * (*hi - *lo);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> noise(-amplitude, amplitude);
        for (double& v : data.y) v += noise(rng);
    }
    return data;
}

IoDataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,u,y") {
        throw CsvError("row 1: expected header 't,u,y'", 1);
    }
    std::vector<double> t;
    std::vector<std::size_t> rows;
    IoDataset data;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = view.find(',', start);
            fields.push_back(view.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 3) {
            throw CsvError("row " + std::to_string(row) + ": expected 3 fields, got " +
                               std::to_string(fields.size()),
                           row);
        }
        rows.push_back(row);
        t.push_back(parse_field(fields[0], row, "t"));
        data.u.push_back(parse_field(fields[1], row, "u"));
        data.y.push_back(parse_field(fields[2], row, "y"));
    }
    if (t.size() < 10) throw CsvError("dataset needs at least 10 samples", row);

    data.T = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(data.T > 0.0)) throw CsvError("time column must be increasing", rows.front());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expected = t.front() + static_cast<double>(i) * data.T;
        if (std::abs(t[i] - expected) > 1e-9 * data.T) {
            throw CsvError("row " + std::to_string(rows[i]) + ": non-uniform sampling", rows[i]);
        }
    }
    return data;
}

IoDataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const IoDataset& data) {
    out << "t,u,y\n";
    char buf[128];
    for (std::size_t i = 0; i < data.u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", static_cast<double>(i) * data.T,
                      data.u[i], data.y[i]);
        out << buf;
    }
}

}  // namespace pointing::sysid
