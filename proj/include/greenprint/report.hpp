#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "greenprint/complexity.hpp"
#include "greenprint/energy_carbon.hpp"
#include "greenprint/reference_executor.hpp"
#include "greenprint/shape_infer.hpp"

namespace greenprint {

inline constexpr std::string_view kToolName = "greenprint";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kConfigFileName = "greenprint.conf";

// Fixed-notation rendering rounded to `digits` significant figures
// (152.0 -> "152", 10.556 -> "10.6", 2548.5 -> "2550").
std::string format_significant(double value, int digits = 3);

std::string sha256_hex(std::string_view data);

// `key=value` lines (gpu_efficiency, carbon_intensity); '#' comments.
// Values found override `base`. Throws ParameterError on unknown keys or
// non-positive values.
EnergyParams parse_energy_config(std::string_view text, EnergyParams base = {});
EnergyParams load_energy_config(const std::filesystem::path& path, EnergyParams base = {});

struct PredictionErrors {
    double mde = 0.0;   // mean Euclidean distance
    double rmse = 0.0;  // root of mean squared Euclidean distance
    std::size_t rows = 0;
};

// Rows "x,y,z,x~,y~,z~"; an optional non-numeric header row is skipped.
// Throws ParseError{MalformedRow} with the 1-based line number.
PredictionErrors evaluate_predictions(std::string_view text);

struct EnergySection {
    std::int64_t m_flops = 0;
    TrainingConfig config;
    EnergyParams params;
    EnergyReport report;
    std::string epochs_source;  // e.g. "category:mean" or "explicit"
};

nlohmann::json energy_json(const EnergySection& section);
nlohmann::json projection_json(const CarbonProjection& projection, std::int64_t m_flops, const EnergyParams& params);

struct AnalysisReport {
    std::string model_name;
    std::string source;  // file path or zoo:<name>
    std::string input_digest;
    ShapedGraph shaped;
    ModelCost cost;
    std::optional<EnergySection> energy;
    std::optional<CarbonProjection> projection;
};

nlohmann::json analysis_json(const AnalysisReport& report);

// index,kind,out_rows,out_cols,out_channels,params,flops, then a totals row.
std::string analysis_csv(const AnalysisReport& report);

std::string projection_csv(const CarbonProjection& projection);

nlohmann::json discrepancy_json(const DiscrepancyReport& report);

// Two-space indented JSON with sorted keys and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace greenprint
