#include "greenprint/model_zoo.hpp"

#include <algorithm>
#include <cctype>

#include "greenprint/errors.hpp"

namespace greenprint {

const char* to_string(Category category) noexcept {
    switch (category) {
        case Category::random: return "random";
        case Category::narrow: return "narrow";
        case Category::wide: return "wide";
        case Category::within: return "within";
        case Category::mean: return "mean";
    }
    return "mean";
}

Category category_from_string(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto c : {Category::random, Category::narrow, Category::wide, Category::within, Category::mean}) {
        if (lower == to_string(c)) return c;
    }
    throw ParameterError("unknown category '" + std::string(text) + "' (random, narrow, wide, within, mean)");
}

double EpochsByCategory::get(Category category) const noexcept {
    switch (category) {
        case Category::random: return random;
        case Category::narrow: return narrow;
        case Category::wide: return wide;
        case Category::within: return within;
        case Category::mean: return mean();
    }
    return mean();
}

ModelGraph pirnateco_graph() {
    ModelGraph g;
    g.name = "pirnateco";
    g.layers.emplace_back(layers::Input{TensorShape{16, 924, 2}});

    layers::Conv2D stem;
    stem.filters = 32;
    stem.geom = KernelGeometry{1, 7, 1, 3, 0, 0};
    stem.activation = Activation::relu();
    g.layers.emplace_back(stem);
    g.layers.emplace_back(layers::BatchNorm{});
    g.layers.emplace_back(layers::Pool{layers::PoolKind::max, KernelGeometry{1, 4, 1, 4, 0, 0}});

    g.layers.emplace_back(layers::ResBlock{32, false});
    g.layers.emplace_back(layers::ResBlock{32, false});
    for (std::int64_t width : {64, 128, 256}) {
        g.layers.emplace_back(layers::ResBlock{width, true});
        g.layers.emplace_back(layers::ResBlock{width, false});
    }

    g.layers.emplace_back(layers::GlobalAvgPool{});
    g.layers.emplace_back(layers::Flatten{});
    g.layers.emplace_back(layers::Dense{1000, Activation::leaky_relu(0.001), true});
    g.layers.emplace_back(layers::Dense{3, Activation::none(), true});
    return validate_graph(std::move(g));
}

namespace {

std::vector<ZooEntry> build_zoo() {
    std::vector<ZooEntry> zoo;

    auto weights_only = [&](std::string name, std::string description, std::int64_t weights) {
        ZooEntry e;
        e.name = std::move(name);
        e.description = std::move(description);
        e.published_weights = weights;
        zoo.push_back(std::move(e));
    };

    ZooEntry pirnat;
    pirnat.name = "pirnateco";
    pirnat.description = "ResNet18-derived CSI localization CNN (reconstructed graph)";
    pirnat.graph = pirnateco_graph();
    pirnat.published_weights = 3'100'000;
    pirnat.published_flops = 345'000'000;
    pirnat.published_energy_kj = 152.0;
    pirnat.published_carbon_g = 10.6;
    pirnat.epochs_by_category = EpochsByCategory{85, 15, 15, 20};
    zoo.push_back(std::move(pirnat));

    ZooEntry chin;
    chin.name = "chin-cnn";
    chin.description = "Chin et al. CNN (metadata only)";
    chin.published_weights = 13'700'000;
    chin.published_flops = 535'000'000;
    chin.published_energy_kj = 264.0;
    chin.published_carbon_g = 18.3;
    chin.epochs_by_category = EpochsByCategory{67, 30, 23, 31};
    zoo.push_back(std::move(chin));

    ZooEntry cerar;
    cerar.name = "cerar-cnn4r";
    cerar.description = "Cerar et al. CNN4R (metadata only)";
    cerar.published_weights = 10'800'000;
    cerar.published_flops = 2'479'000'000;
    cerar.published_energy_kj = 2547.0;
    cerar.published_carbon_g = 176.9;
    cerar.epochs_by_category = EpochsByCategory{181, 32, 34, 68};
    zoo.push_back(std::move(cerar));

    weights_only("arnold-fcnn", "Arnold et al. FCNN (metadata only)", 32'300'000);
    weights_only("arnold-cnn", "Arnold et al. CNN (metadata only)", 7'600'000);
    weights_only("debast-cnn", "De Bast et al. CNN (metadata only)", 400'000);
    weights_only("chin-fcnn", "Chin et al. FCNN (metadata only)", 123'600'000);
    weights_only("cerar-cnn4", "Cerar et al. CNN4 (metadata only)", 5'300'000);
    weights_only("cerar-cnn4s", "Cerar et al. CNN4S (metadata only)", 16'300'000);

    std::sort(zoo.begin(), zoo.end(), [](const ZooEntry& a, const ZooEntry& b) { return a.name < b.name; });
    return zoo;
}

const std::vector<ZooEntry>& zoo() {
    static const std::vector<ZooEntry> entries = build_zoo();
    return entries;
}

}  // namespace

const ZooEntry& get_model(std::string_view name) {
    for (const auto& e : zoo()) {
        if (e.name == name) return e;
    }
    throw UnknownModel(std::string(name));
}

std::vector<ZooListing> list_models() {
    std::vector<ZooListing> out;
    for (const auto& e : zoo()) out.push_back({e.name, e.graph.has_value(), e.has_metadata()});
    return out;
}

TrainingConfig default_training_config(Category category, std::string_view model) {
    const auto& entry = get_model(model);
    if (!entry.epochs_by_category) {
        throw ParameterError("model '" + std::string(model) + "' has no published epoch schedule");
    }
    TrainingConfig cfg;
    cfg.training_samples = kTrainingSamples;
    cfg.batch_size = kBatchSize;
    cfg.epochs = entry.epochs_by_category->get(category);
    return cfg;
}

}  // namespace greenprint
