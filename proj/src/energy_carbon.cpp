#include "greenprint/energy_carbon.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ParameterError(std::string(name) + " must be a positive finite number");
    }
}

void require_non_negative(std::int64_t value, const char* name) {
    if (value < 0) throw ParameterError(std::string(name) + " must be >= 0");
}

}  // namespace

void EnergyParams::validate() const {
    require_positive(gpu_efficiency, "gpu_efficiency");
    require_positive(carbon_intensity, "carbon_intensity");
}

void TrainingConfig::validate() const {
    if (training_samples < 1) throw ParameterError("training_samples must be >= 1");
    require_positive(epochs, "epochs");
    if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
}

double energy_forward(std::int64_t m_flops, const TrainingConfig& cfg, const EnergyParams& params) {
    require_non_negative(m_flops, "m_flops");
    cfg.validate();
    params.validate();
    return static_cast<double>(m_flops) * static_cast<double>(cfg.training_samples) * cfg.epochs / params.gpu_efficiency;
}

EnergyReport energy_training(std::int64_t m_flops, const TrainingConfig& cfg, const EnergyParams& params) {
    EnergyReport report;
    report.e_forward = energy_forward(m_flops, cfg, params);
    report.e_backward = 2.0 * report.e_forward;
    report.e_training = 3.0 * report.e_forward;
    report.carbon_training = carbon_from_energy(report.e_training, params.carbon_intensity);
    return report;
}

double energy_prediction(std::int64_t m_flops, std::int64_t n_predictions, const EnergyParams& params) {
    require_non_negative(m_flops, "m_flops");
    require_non_negative(n_predictions, "n_predictions");
    params.validate();
    return static_cast<double>(m_flops) * static_cast<double>(n_predictions) / params.gpu_efficiency;
}

double carbon_from_energy(double joules, double carbon_intensity) {
    if (!std::isfinite(joules) || joules < 0.0) throw ParameterError("energy must be a non-negative finite number");
    require_positive(carbon_intensity, "carbon_intensity");
    return joules / kJoulesPerKilowattHour * carbon_intensity;
}

CarbonProjection project_carbon(std::int64_t m_flops, std::int64_t predictions_per_year, const EnergyParams& params) {
    if (predictions_per_year < 1) throw ParameterError("predictions per year must be >= 1");
    auto point = [&](std::int64_t n) {
        const double joules = energy_prediction(m_flops, n, params);
        return ProjectionPoint{n, joules, carbon_from_energy(joules, params.carbon_intensity)};
    };
    CarbonProjection projection;
    std::int64_t n = 1;
    while (true) {
        projection.curve.push_back(point(n));
        if (n > predictions_per_year / 10) break;
        n *= 10;
    }
    if (projection.curve.back().predictions != predictions_per_year) projection.curve.push_back(point(predictions_per_year));
    projection.annual = projection.curve.back();
    return projection;
}

std::int64_t annual_predictions(double users, double per_user_per_hour) {
    require_positive(users, "users");
    require_positive(per_user_per_hour, "predictions per user per hour");
    const double n = std::round(users * per_user_per_hour * kHoursPerYear);
    if (n < 1.0 || n > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2)) {
        throw ParameterError("annual prediction count is out of range");
    }
    return static_cast<std::int64_t>(n);
}

double backsolve_gpu_efficiency(std::int64_t m_flops, const TrainingConfig& cfg, double e_training_target) {
    if (m_flops < 1) throw ParameterError("m_flops must be >= 1");
    cfg.validate();
    require_positive(e_training_target, "training energy");
    // Same operation order as energy_forward so the round trip is tight.
    const double forward_work = static_cast<double>(m_flops) * static_cast<double>(cfg.training_samples) * cfg.epochs;
    return forward_work / (e_training_target / 3.0);
}

}  // namespace greenprint
