#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace greenprint {

// rows x cols x channels feature map. A flattened tensor is 1 x 1 x N.
struct TensorShape {
    std::int64_t rows = 1;
    std::int64_t cols = 1;
    std::int64_t channels = 1;

    std::int64_t elements() const noexcept { return rows * cols * channels; }
    bool is_flat() const noexcept { return rows == 1 && cols == 1; }
    bool is_valid() const noexcept { return rows >= 1 && cols >= 1 && channels >= 1; }

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

std::string to_string(const TensorShape& shape);

struct KernelGeometry {
    std::int64_t k_rows = 1;
    std::int64_t k_cols = 1;
    std::int64_t s_rows = 1;
    std::int64_t s_cols = 1;
    std::int64_t p_rows = 0;
    std::int64_t p_cols = 0;

    bool is_valid() const noexcept {
        return k_rows >= 1 && k_cols >= 1 && s_rows >= 1 && s_cols >= 1 && p_rows >= 0 && p_cols >= 0;
    }
    bool has_padding() const noexcept { return p_rows != 0 || p_cols != 0; }

    friend bool operator==(const KernelGeometry&, const KernelGeometry&) = default;
};

enum class ActivationKind { none, relu, leaky_relu };

const char* to_string(ActivationKind kind) noexcept;

struct Activation {
    ActivationKind kind = ActivationKind::none;
    double alpha = 0.0;  // leaky slope; zero for every other kind

    static constexpr double kDefaultLeakyAlpha = 0.001;

    static Activation none() { return {}; }
    static Activation relu() { return {ActivationKind::relu, 0.0}; }
    static Activation leaky_relu(double alpha = kDefaultLeakyAlpha) { return {ActivationKind::leaky_relu, alpha}; }

    bool is_active() const noexcept { return kind != ActivationKind::none; }
    bool is_valid() const noexcept {
        return kind == ActivationKind::leaky_relu ? alpha >= 0.0 : alpha == 0.0;
    }

    friend bool operator==(const Activation&, const Activation&) = default;
};

namespace layers {

struct Input {
    TensorShape shape;
    friend bool operator==(const Input&, const Input&) = default;
};

// `branch`, when non-empty, makes the layer consume and rebind the labelled
// tensor instead of the running one (used for residual projections).
struct Conv2D {
    std::int64_t filters = 1;
    KernelGeometry geom;
    Activation activation;
    bool bias = true;
    std::string branch;
    friend bool operator==(const Conv2D&, const Conv2D&) = default;
};

enum class PoolKind { max, avg };

struct Pool {
    PoolKind kind = PoolKind::max;
    KernelGeometry geom;
    friend bool operator==(const Pool&, const Pool&) = default;
};

struct Dense {
    std::int64_t units = 1;
    Activation activation;
    bool bias = true;
    friend bool operator==(const Dense&, const Dense&) = default;
};

struct BatchNorm {
    std::string branch;
    friend bool operator==(const BatchNorm&, const BatchNorm&) = default;
};

struct Flatten {
    friend bool operator==(const Flatten&, const Flatten&) = default;
};

struct GlobalAvgPool {
    friend bool operator==(const GlobalAvgPool&, const GlobalAvgPool&) = default;
};

// Element-wise addition of a labelled tensor onto the running tensor.
struct AddFrom {
    std::string label;
    friend bool operator==(const AddFrom&, const AddFrom&) = default;
};

struct LabelPoint {
    std::string label;
    friend bool operator==(const LabelPoint&, const LabelPoint&) = default;
};

// Zero-parameter nonlinearity, e.g. the ReLU after a residual addition.
struct ActivationOnly {
    Activation activation = Activation::relu();
    friend bool operator==(const ActivationOnly&, const ActivationOnly&) = default;
};

// Macro for a ResNet basic block; expanded by normalize_graph.
struct ResBlock {
    std::int64_t filters = 1;
    bool downsample = false;
    friend bool operator==(const ResBlock&, const ResBlock&) = default;
};

}  // namespace layers

using LayerSpec = std::variant<layers::Input,
                               layers::Conv2D,
                               layers::Pool,
                               layers::Dense,
                               layers::BatchNorm,
                               layers::Flatten,
                               layers::GlobalAvgPool,
                               layers::AddFrom,
                               layers::LabelPoint,
                               layers::ActivationOnly,
                               layers::ResBlock>;

// Short lowercase name of the layer kind ("conv2d", "maxpool", ...).
std::string_view layer_kind(const LayerSpec& layer);

// Label of the tensor the layer reads from and rebinds, or empty for the main path.
std::string_view layer_branch(const LayerSpec& layer);

struct ModelGraph {
    std::string name;
    std::vector<LayerSpec> layers;
    // label -> index of the LabelPoint defining it; filled by validate_graph.
    std::map<std::string, std::size_t, std::less<>> labels;

    bool has_macros() const;

    friend bool operator==(const ModelGraph& a, const ModelGraph& b) {
        return a.name == b.name && a.layers == b.layers;
    }
};

// Throws GraphError naming the offending layer index.
ModelGraph validate_graph(ModelGraph graph);

// Expands every ResBlock into concrete layers; identity on macro-free graphs.
ModelGraph normalize_graph(const ModelGraph& graph);

}  // namespace greenprint
