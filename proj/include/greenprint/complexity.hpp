#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenprint/arch.hpp"
#include "greenprint/shape_infer.hpp"

namespace greenprint {

// paper_fidelity counts only dense, convolution and pooling layers.
// extended also charges batchnorm (2 per element), additions and standalone
// activations (1 per element) and global average pooling (elements + channels).
enum class CountingMode { paper_fidelity, extended };

const char* to_string(CountingMode mode) noexcept;
CountingMode counting_mode_from_string(std::string_view text);

struct CostOptions {
    CountingMode mode = CountingMode::paper_fidelity;
    // Charge a convolution's activation one FLOP per output element instead of
    // the (2*C*Kr*Kc + 1) per filter used by default.
    bool relu_per_element = false;
};

struct LayerCost {
    std::size_t layer_index = 0;
    std::int64_t flops = 0;
    // Part of `flops` attributable to the layer's activation function.
    std::int64_t activation_flops = 0;
    std::int64_t params = 0;
    TensorShape output_shape;
    std::string derivation;  // human-readable arithmetic behind `flops`
};

struct ModelCost {
    CostOptions options;
    std::vector<LayerCost> per_layer;
    std::int64_t total_flops = 0;
    std::int64_t total_params = 0;
};

// 2*Is*Os, plus Os when the layer has an activation.
std::int64_t flops_fc(std::int64_t input_size, std::int64_t output_size, const Activation& activation);

// Hout * Wout * (2*C*Kr*Kc + 1).
std::int64_t flops_conv_filter(const TensorShape& in, const KernelGeometry& geom);

// (F_pf + (2*C*Kr*Kc + 1)) * Nf with an activation, F_pf * Nf without.
std::int64_t flops_conv_layer(const TensorShape& in, const KernelGeometry& geom, std::int64_t filters,
                              const Activation& activation, bool relu_per_element = false);

// Hout * Wout * (2*C*Kr*Kc + 1); pooling takes no padding.
std::int64_t flops_pool(const TensorShape& in, const KernelGeometry& geom);

std::int64_t param_count(const LayerSpec& layer, const TensorShape& in);

ModelCost model_cost(const ShapedGraph& graph, const CostOptions& options = {});

}  // namespace greenprint
