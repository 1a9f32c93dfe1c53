#include <doctest.h>

#include <random>

#include "greenprint/complexity.hpp"
#include "greenprint/errors.hpp"
#include "greenprint/model_dsl.hpp"
#include "greenprint/shape_infer.hpp"
#include "oracles.hpp"

using namespace greenprint;

namespace {

// Hand oracle: Hout*Wout*(2*C*Kr*Kc+1) with Hout/Wout from window enumeration.
std::int64_t oracle_filter(std::int64_t r, std::int64_t c, std::int64_t ch, const KernelGeometry& g) {
    return testing::window_count(r, g.k_rows, g.p_rows, g.s_rows) * testing::window_count(c, g.k_cols, g.p_cols, g.s_cols) *
           (2 * ch * g.k_rows * g.k_cols + 1);
}

ModelCost cost_of(std::string_view text, CostOptions options = {}) {
    return model_cost(infer_shapes(normalize_graph(parse_model(text))), options);
}

}  // namespace

TEST_CASE("dense formula") {
    CHECK(flops_fc(4, 2, Activation::none()) == 16);
    CHECK(flops_fc(4, 2, Activation::relu()) == 18);
    CHECK(flops_fc(512, 1000, Activation::leaky_relu(0.001)) == 2 * 512 * 1000 + 1000);
    CHECK_THROWS_AS(flops_fc(0, 2, Activation::none()), ParameterError);
}

TEST_CASE("per-filter convolution formula") {
    CHECK(flops_conv_filter({4, 4, 1}, KernelGeometry{2, 2, 1, 1, 0, 0}) == 81);
    CHECK(flops_conv_filter({16, 924, 2}, KernelGeometry{1, 7, 1, 3, 0, 0}) == 141984);
}

TEST_CASE("convolution layer formula with and without activation") {
    const KernelGeometry stem{1, 7, 1, 3, 0, 0};
    CHECK(flops_conv_layer({16, 924, 2}, stem, 32, Activation::relu()) == 4544416);
    CHECK(flops_conv_layer({16, 924, 2}, stem, 32, Activation::none()) == 141984 * 32);
    CHECK(flops_conv_layer({16, 924, 2}, stem, 32, Activation::relu(), true) == 141984 * 32 + 16 * 306 * 32);
    CHECK_THROWS_AS(flops_conv_layer({16, 924, 2}, stem, 0, Activation::relu()), ParameterError);
}

TEST_CASE("pooling uses the per-filter formula verbatim") {
    CHECK(flops_pool({16, 306, 32}, KernelGeometry{1, 4, 1, 4, 0, 0}) == 312512);
    CHECK_THROWS_AS(flops_pool({4, 4, 1}, KernelGeometry{2, 2, 2, 2, 1, 1}), GraphError);
}

TEST_CASE("parameter counts") {
    layers::Conv2D conv;
    conv.filters = 32;
    conv.geom = KernelGeometry{1, 7, 1, 3, 0, 0};
    CHECK(param_count(conv, {16, 924, 2}) == 32 * (2 * 7 + 1));
    conv.bias = false;
    CHECK(param_count(conv, {16, 924, 2}) == 32 * 2 * 7);
    CHECK(param_count(layers::Dense{1000, Activation::none(), true}, {1, 1, 512}) == 513000);
    CHECK(param_count(layers::BatchNorm{}, {8, 8, 64}) == 128);
    CHECK(param_count(layers::Flatten{}, {8, 8, 64}) == 0);
}

TEST_CASE("per-layer derivations show the arithmetic") {
    const auto cost = cost_of("input 16 924 2\nconv2d filters=32 kernel=1x7 stride=1x3 activation=relu\nmaxpool kernel=1x4");
    CHECK(cost.per_layer[1].derivation == "(16*306*(2*2*1*7+1) + 29)*32 = 4544416");
    CHECK(cost.per_layer[1].activation_flops == 29 * 32);
    CHECK(cost.per_layer[2].derivation == "16*76*(2*32*1*4+1) = 312512");
    CHECK(cost.total_flops == 4544416 + 312512);
}

TEST_CASE("minimal graph costs nothing") {
    const auto cost = cost_of("input 1 1 1");
    CHECK(cost.total_flops == 0);
    CHECK(cost.total_params == 0);
}

TEST_CASE("paper_fidelity mode ignores batchnorm, skips and global pooling; extended counts them") {
    const std::string text = "input 4 4 2\nlabel a\nbatchnorm\naddfrom a\nactivation kind=relu\nglobalavgpool";
    CHECK(cost_of(text).total_flops == 0);
    CHECK(cost_of(text).total_params == 4);
    const auto ext = cost_of(text, {CountingMode::extended, false});
    CHECK(ext.per_layer[2].flops == 64);
    CHECK(ext.per_layer[3].flops == 32);
    CHECK(ext.per_layer[4].flops == 32);
    CHECK(ext.per_layer[5].flops == 34);
}

TEST_CASE("counting modes parse") {
    CHECK(counting_mode_from_string("paper_fidelity") == CountingMode::paper_fidelity);
    CHECK(counting_mode_from_string("extended") == CountingMode::extended);
    CHECK_THROWS_AS(counting_mode_from_string("fast"), ParameterError);
}

TEST_CASE("formula properties on random geometries") {
    std::mt19937_64 rng(23);
    auto uni = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
    for (int trial = 0; trial < 2000; ++trial) {
        const TensorShape in{uni(1, 40), uni(1, 40), uni(1, 16)};
        KernelGeometry g{uni(1, 5), uni(1, 5), uni(1, 4), uni(1, 4), uni(0, 2), uni(0, 2)};
        if (g.k_rows > in.rows + 2 * g.p_rows || g.k_cols > in.cols + 2 * g.p_cols) continue;
        const auto filters = uni(1, 8);
        CHECK(flops_conv_filter(in, g) == oracle_filter(in.rows, in.cols, in.channels, g));
        // monotone in filter count and linear without activation
        CHECK(flops_conv_layer(in, g, filters + 1, Activation::relu()) > flops_conv_layer(in, g, filters, Activation::relu()));
        CHECK(flops_conv_layer(in, g, filters, Activation::none()) == filters * flops_conv_filter(in, g));
        // more channels never cost less
        const TensorShape wider{in.rows, in.cols, in.channels + 1};
        CHECK(flops_conv_filter(wider, g) > flops_conv_filter(in, g));
    }
}

TEST_CASE("totals are additive over layers and extended is never below paper_fidelity") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto shaped = infer_shapes(testing::random_desk_graph(rng));
        const auto base = model_cost(shaped);
        const auto ext = model_cost(shaped, {CountingMode::extended, false});
        std::int64_t flops = 0, params = 0;
        for (const auto& l : base.per_layer) {
            flops += l.flops;
            params += l.params;
        }
        CHECK(flops == base.total_flops);
        CHECK(params == base.total_params);
        CHECK(ext.total_flops >= base.total_flops);
        CHECK(ext.total_params == base.total_params);
    }
}

TEST_CASE("overflow is reported instead of wrapping") {
    CHECK_THROWS_AS(flops_fc(std::int64_t{1} << 40, std::int64_t{1} << 40, Activation::none()), ParameterError);
}
