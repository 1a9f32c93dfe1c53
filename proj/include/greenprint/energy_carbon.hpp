#pragma once

#include <cstdint>
#include <vector>

namespace greenprint {

inline constexpr double kJoulesPerKilowattHour = 3.6e6;
inline constexpr double kHoursPerYear = 8760.0;

struct EnergyParams {
    // Sustained FLOPs per joule of the training device. The default is the
    // value that reproduces the published training energies of the zoo rows.
    static constexpr double kDefaultGpuEfficiency = 3.613e9;
    // g CO2eq per kWh, US west coast grid.
    static constexpr double kDefaultCarbonIntensity = 250.0;

    double gpu_efficiency = kDefaultGpuEfficiency;
    double carbon_intensity = kDefaultCarbonIntensity;

    // Throws ParameterError unless both values are finite and > 0.
    void validate() const;
};

struct TrainingConfig {
    std::int64_t training_samples = 15723;
    double epochs = 1.0;  // may be a mean over dataset splits
    std::int64_t batch_size = 32;  // recorded only

    void validate() const;
};

struct EnergyReport {
    double e_forward = 0.0;   // J
    double e_backward = 0.0;  // J
    double e_training = 0.0;  // J
    double carbon_training = 0.0;  // g CO2eq
};

// m_flops * samples * epochs / gpu_efficiency, in joules.
double energy_forward(std::int64_t m_flops, const TrainingConfig& cfg, const EnergyParams& params);

// Backward pass is modelled as twice the forward energy.
EnergyReport energy_training(std::int64_t m_flops, const TrainingConfig& cfg, const EnergyParams& params);

double energy_prediction(std::int64_t m_flops, std::int64_t n_predictions, const EnergyParams& params);

double carbon_from_energy(double joules, double carbon_intensity);

struct ProjectionPoint {
    std::int64_t predictions = 0;
    double joules = 0.0;
    double grams = 0.0;
};

struct CarbonProjection {
    std::vector<ProjectionPoint> curve;  // 1, 10, 100, ... then the annual total
    ProjectionPoint annual;
};

CarbonProjection project_carbon(std::int64_t m_flops, std::int64_t predictions_per_year, const EnergyParams& params);

// users * per_user_per_hour * 8760, rounded to the nearest integer.
std::int64_t annual_predictions(double users, double per_user_per_hour = 1.0);

// Device efficiency for which energy_training(...).e_training == e_training_target.
double backsolve_gpu_efficiency(std::int64_t m_flops, const TrainingConfig& cfg, double e_training_target);

}  // namespace greenprint
