#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenprint/complexity.hpp"
#include "greenprint/shape_infer.hpp"

namespace greenprint {

// Dense rows x cols x channels tensor, channel-innermost row-major layout.
struct Tensor {
    TensorShape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(const TensorShape& s, double fill = 0.0)
        : shape(s), data(static_cast<std::size_t>(s.elements()), fill) {}

    std::size_t offset(std::int64_t r, std::int64_t c, std::int64_t ch) const {
        return static_cast<std::size_t>((r * shape.cols + c) * shape.channels + ch);
    }
    double& at(std::int64_t r, std::int64_t c, std::int64_t ch) { return data[offset(r, c, ch)]; }
    double at(std::int64_t r, std::int64_t c, std::int64_t ch) const { return data[offset(r, c, ch)]; }
};

struct OpCount {
    std::int64_t muls = 0;
    std::int64_t adds = 0;
    std::int64_t comparisons = 0;

    std::int64_t counted_flops() const noexcept { return muls + adds; }
    friend bool operator==(const OpCount&, const OpCount&) = default;
};

// Largest spatial extent (rows, cols) and element count the executor accepts.
inline constexpr std::int64_t kDeskScaleMaxDim = 64;
inline constexpr std::int64_t kDeskScaleMaxElements = 64 * 64 * 64;

struct ExecutorOptions {
    std::uint64_t seed = 0;
    bool zero_biases = false;  // biases and batchnorm shifts set to 0
};

struct ExecutionResult {
    Tensor output;
    std::vector<OpCount> per_layer;
};

// Runs the graph with naive loops on seeded pseudo-random parameters,
// counting every arithmetic operation. Throws DeskScaleExceeded for shapes
// beyond desk scale and ExecutorShapeMismatch if `input` does not match.
ExecutionResult execute_counting(const ShapedGraph& graph, const Tensor& input, const ExecutorOptions& options = {});

// Seeded uniform(-1, 1) tensor of the graph's input shape.
Tensor random_input(const TensorShape& shape, std::uint64_t seed);

// Deterministic parameters of a conv or dense layer as the executor uses them.
struct LayerParameters {
    std::vector<double> weights;  // conv: [filter][kr][kc][ch], dense: [unit][input]
    std::vector<double> biases;
};
LayerParameters layer_parameters(std::size_t layer_index, std::int64_t weight_count, std::int64_t bias_count,
                                 const ExecutorOptions& options);

enum class Agreement {
    ExactMatch,       // analytic == counted
    FixedOffset,      // conv: analytic core - counted == Hout*Wout*Nf
    FormulaMismatch,  // pooling: analytic formula is not an operation count
    NotModeled,       // layer does work the paper_fidelity count assigns 0
    Unexplained,      // anything else; a failure
};

const char* to_string(Agreement agreement) noexcept;

struct LayerDiscrepancy {
    std::size_t layer_index = 0;
    std::string kind;
    std::int64_t analytic = 0;        // value compared (conv: excludes the activation term)
    std::int64_t counted = 0;         // executor FLOPs compared against `analytic`
    std::int64_t difference = 0;      // analytic - counted
    std::int64_t expected_offset = 0;
    OpCount measured;
    Agreement agreement = Agreement::Unexplained;
};

struct DiscrepancyReport {
    std::vector<LayerDiscrepancy> layers;
    bool all_expected() const;
};

// Classifies each layer. Dense layers compare the full analytic count with
// muls + adds + activation comparisons; convolutions compare the
// activation-free count with muls + adds. Requires a paper_fidelity cost.
DiscrepancyReport compare_counts(const ShapedGraph& graph, const ModelCost& analytic, const std::vector<OpCount>& counted);

}  // namespace greenprint
