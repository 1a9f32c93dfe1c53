#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenprint/arch.hpp"
#include "greenprint/energy_carbon.hpp"

namespace greenprint {

// Train/test splits of the CTW 2019 evaluation; `mean` averages the four.
enum class Category { random, narrow, wide, within, mean };

const char* to_string(Category category) noexcept;
Category category_from_string(std::string_view text);

struct EpochsByCategory {
    int random = 0;
    int narrow = 0;
    int wide = 0;
    int within = 0;

    double mean() const noexcept { return (random + narrow + wide + within) / 4.0; }
    double get(Category category) const noexcept;
};

struct ZooEntry {
    std::string name;
    std::string description;
    std::optional<ModelGraph> graph;  // macros kept; normalize before costing
    std::optional<std::int64_t> published_weights;
    std::optional<std::int64_t> published_flops;
    std::optional<double> published_energy_kj;
    std::optional<double> published_carbon_g;
    std::optional<EpochsByCategory> epochs_by_category;

    bool has_metadata() const noexcept {
        return published_weights || published_flops || published_energy_kj || published_carbon_g;
    }
};

struct ZooListing {
    std::string name;
    bool has_graph = false;
    bool has_metadata = false;
};

// Throws UnknownModel.
const ZooEntry& get_model(std::string_view name);

// Sorted by name.
std::vector<ZooListing> list_models();

inline constexpr std::int64_t kTrainingSamples = 15723;
inline constexpr std::int64_t kTestSamples = 1748;
inline constexpr std::int64_t kBatchSize = 32;

// Epochs come from `model`'s per-category schedule.
TrainingConfig default_training_config(Category category, std::string_view model = "pirnateco");

// The reconstructed PirnatEco graph, with resblock macros.
ModelGraph pirnateco_graph();

}  // namespace greenprint
