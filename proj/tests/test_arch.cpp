#include <doctest.h>

#include <random>

#include "greenprint/arch.hpp"
#include "greenprint/errors.hpp"
#include "oracles.hpp"

using namespace greenprint;

namespace {

ModelGraph graph_of(std::vector<LayerSpec> layers) {
    ModelGraph g;
    g.name = "t";
    g.layers = std::move(layers);
    return g;
}

GraphErrorKind graph_error_kind(const ModelGraph& g, std::size_t* index = nullptr) {
    try {
        validate_graph(g);
    } catch (const GraphError& e) {
        if (index != nullptr) *index = e.layer_index();
        return e.kind();
    }
    FAIL("expected a GraphError");
    return GraphErrorKind::InvalidField;
}

std::size_t count_non_labels(const ModelGraph& g) {
    std::size_t n = 0;
    for (const auto& l : g.layers) n += std::holds_alternative<layers::LabelPoint>(l) ? 0 : 1;
    return n;
}

}  // namespace

TEST_CASE("validate_graph accepts the stem of the localization network") {
    layers::Conv2D conv;
    conv.filters = 32;
    conv.geom = KernelGeometry{1, 7, 1, 3, 0, 0};
    auto g = validate_graph(graph_of({layers::Input{{16, 924, 2}}, conv}));
    CHECK(g.layers.size() == 2);
}

TEST_CASE("validate_graph accepts the minimal graph") {
    CHECK_NOTHROW(validate_graph(graph_of({layers::Input{{1, 1, 1}}})));
}

TEST_CASE("validate_graph error paths name the offending layer") {
    std::size_t index = 99;
    layers::Conv2D conv;
    CHECK(graph_error_kind(graph_of({conv}), &index) == GraphErrorKind::MissingInput);
    CHECK(index == 0);
    CHECK(graph_error_kind(graph_of({}), &index) == GraphErrorKind::MissingInput);

    CHECK(graph_error_kind(graph_of({layers::Input{}, layers::Input{}}), &index) == GraphErrorKind::MisplacedInput);
    CHECK(index == 1);

    CHECK(graph_error_kind(graph_of({layers::Input{}, layers::LabelPoint{"a"}, layers::Flatten{}, layers::LabelPoint{"a"}}),
                           &index) == GraphErrorKind::DuplicateLabel);
    CHECK(index == 3);

    CHECK(graph_error_kind(graph_of({layers::Input{}, layers::AddFrom{"skip"}}), &index) ==
          GraphErrorKind::DanglingSkipReference);
    CHECK(index == 1);
    // references must point strictly backwards
    CHECK(graph_error_kind(graph_of({layers::Input{}, layers::AddFrom{"s"}, layers::LabelPoint{"s"}})) ==
          GraphErrorKind::DanglingSkipReference);
    CHECK(graph_error_kind(graph_of({layers::Input{}, layers::BatchNorm{"nowhere"}})) == GraphErrorKind::DanglingSkipReference);

    layers::Pool padded{layers::PoolKind::max, KernelGeometry{2, 2, 2, 2, 1, 0}};
    CHECK(graph_error_kind(graph_of({layers::Input{}, padded}), &index) == GraphErrorKind::PoolWithPadding);
    CHECK(index == 1);

    layers::Conv2D zero;
    zero.filters = 0;
    CHECK(graph_error_kind(graph_of({layers::Input{}, zero})) == GraphErrorKind::InvalidField);
    layers::Dense relu_with_alpha{4, Activation{ActivationKind::relu, 0.5}, true};
    CHECK(graph_error_kind(graph_of({layers::Input{}, relu_with_alpha})) == GraphErrorKind::InvalidField);
    CHECK(graph_error_kind(graph_of({layers::Input{{0, 1, 1}}})) == GraphErrorKind::InvalidField);
}

TEST_CASE("validate_graph fills the label table") {
    auto g = validate_graph(graph_of({layers::Input{}, layers::LabelPoint{"a"}, layers::Flatten{}, layers::LabelPoint{"b"}}));
    REQUIRE(g.labels.size() == 2);
    CHECK(g.labels.at("a") == 1);
    CHECK(g.labels.at("b") == 3);
}

TEST_CASE("identity resblock expands to two convs, two batchnorms and an identity skip") {
    auto g = normalize_graph(graph_of({layers::Input{{8, 8, 32}}, layers::ResBlock{32, false}}));
    CHECK_FALSE(g.has_macros());
    // label, conv, bn, conv, bn, addfrom, relu
    REQUIRE(g.layers.size() == 8);
    CHECK(count_non_labels(g) - 1 == 6);

    const auto& label = std::get<layers::LabelPoint>(g.layers[1]);
    const auto& c1 = std::get<layers::Conv2D>(g.layers[2]);
    CHECK(c1.filters == 32);
    CHECK(c1.geom == KernelGeometry{3, 3, 1, 1, 1, 1});
    CHECK(c1.activation == Activation::relu());
    CHECK(std::holds_alternative<layers::BatchNorm>(g.layers[3]));
    const auto& c2 = std::get<layers::Conv2D>(g.layers[4]);
    CHECK(c2.geom == KernelGeometry{3, 3, 1, 1, 1, 1});
    CHECK_FALSE(c2.activation.is_active());
    CHECK(std::holds_alternative<layers::BatchNorm>(g.layers[5]));
    CHECK(std::get<layers::AddFrom>(g.layers[6]).label == label.label);
    CHECK(std::get<layers::ActivationOnly>(g.layers[7]).activation == Activation::relu());
}

TEST_CASE("downsampling resblock adds a strided 1x1 projection on the skip branch") {
    auto g = normalize_graph(graph_of({layers::Input{{8, 8, 32}}, layers::ResBlock{64, true}}));
    CHECK(count_non_labels(g) - 1 == 8);
    const auto& label = std::get<layers::LabelPoint>(g.layers[1]).label;
    const auto& c1 = std::get<layers::Conv2D>(g.layers[2]);
    CHECK(c1.geom == KernelGeometry{3, 3, 2, 2, 1, 1});
    const auto& proj = std::get<layers::Conv2D>(g.layers[6]);
    CHECK(proj.filters == 64);
    CHECK(proj.geom == KernelGeometry{1, 1, 2, 2, 0, 0});
    CHECK_FALSE(proj.activation.is_active());
    CHECK(proj.branch == label);
    CHECK(std::get<layers::BatchNorm>(g.layers[7]).branch == label);
    CHECK(std::get<layers::AddFrom>(g.layers[8]).label == label);
}

TEST_CASE("normalize_graph without macros is the identity") {
    layers::Dense d{3, Activation::none(), true};
    auto g = graph_of({layers::Input{}, layers::Flatten{}, d});
    CHECK(normalize_graph(g) == g);
}

TEST_CASE("generated labels avoid user labels") {
    auto g = normalize_graph(graph_of({layers::Input{{4, 4, 8}}, layers::LabelPoint{"rb1"}, layers::ResBlock{8, false}}));
    CHECK(std::get<layers::LabelPoint>(g.layers[2]).label == "rb2");
}

TEST_CASE("normalize_graph properties on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const ModelGraph g = validate_graph(testing::random_dsl_graph(rng));
        const ModelGraph once = normalize_graph(g);
        // idempotent and accepted by validation
        CHECK(normalize_graph(once) == once);
        CHECK_NOTHROW(validate_graph(once));
        CHECK_FALSE(once.has_macros());
        CHECK(std::holds_alternative<layers::Input>(once.layers.front()));
        // non-macro layers keep their relative order
        std::vector<LayerSpec> original;
        for (const auto& l : g.layers)
            if (!std::holds_alternative<layers::ResBlock>(l)) original.push_back(l);
        std::size_t pos = 0;
        for (const auto& l : once.layers) {
            if (pos < original.size() && l == original[pos]) ++pos;
        }
        CHECK(pos == original.size());
    }
}
