#include "greenprint/arch.hpp"

#include <set>

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    for (char c : s) {
        if (!alpha(c) && !digit(c)) return false;
    }
    return true;
}

class Validator {
public:
    explicit Validator(ModelGraph& graph) : graph_(graph) {}

    void run() {
        if (graph_.layers.empty() || !std::holds_alternative<layers::Input>(graph_.layers.front())) {
            throw GraphError(GraphErrorKind::MissingInput, 0, "the first layer must be an input layer");
        }
        graph_.labels.clear();
        for (index_ = 0; index_ < graph_.layers.size(); ++index_) {
            std::visit([this](const auto& layer) { check(layer); }, graph_.layers[index_]);
        }
    }

private:
    [[noreturn]] void fail(GraphErrorKind kind, const std::string& detail) const {
        throw GraphError(kind, index_, detail);
    }

    void require(bool ok, const std::string& detail) const {
        if (!ok) fail(GraphErrorKind::InvalidField, detail);
    }

    void check_reference(const std::string& label) const {
        if (!graph_.labels.contains(label)) {
            fail(GraphErrorKind::DanglingSkipReference, "label '" + label + "' is not defined by an earlier label point");
        }
    }

    void check_branch(const std::string& branch) const {
        if (!branch.empty()) check_reference(branch);
    }

    void check(const layers::Input& input) const {
        if (index_ != 0) fail(GraphErrorKind::MisplacedInput, "input layer must appear only at position 0");
        require(input.shape.is_valid(), "input dimensions must be >= 1");
    }
    void check(const layers::Conv2D& conv) const {
        require(conv.filters >= 1, "filters must be >= 1");
        require(conv.geom.is_valid(), "kernel and stride must be >= 1, padding >= 0");
        require(conv.activation.is_valid(), "alpha is only allowed (and must be >= 0) for leaky_relu");
        check_branch(conv.branch);
    }
    void check(const layers::Pool& pool) const {
        require(pool.geom.is_valid(), "pool kernel and stride must be >= 1");
        if (pool.geom.has_padding()) fail(GraphErrorKind::PoolWithPadding, "pooling layers take no padding");
    }
    void check(const layers::Dense& dense) const {
        require(dense.units >= 1, "units must be >= 1");
        require(dense.activation.is_valid(), "alpha is only allowed (and must be >= 0) for leaky_relu");
    }
    void check(const layers::BatchNorm& bn) const { check_branch(bn.branch); }
    void check(const layers::Flatten&) const {}
    void check(const layers::GlobalAvgPool&) const {}
    void check(const layers::AddFrom& add) const { check_reference(add.label); }
    void check(const layers::LabelPoint& point) {
        require(is_identifier(point.label), "label '" + point.label + "' is not an identifier");
        if (!graph_.labels.emplace(point.label, index_).second) {
            fail(GraphErrorKind::DuplicateLabel, "label '" + point.label + "' is already defined");
        }
    }
    void check(const layers::ActivationOnly& act) const {
        require(act.activation.is_active(), "activation layer needs a non-identity activation");
        require(act.activation.is_valid(), "alpha is only allowed (and must be >= 0) for leaky_relu");
    }
    void check(const layers::ResBlock& block) const { require(block.filters >= 1, "filters must be >= 1"); }

    ModelGraph& graph_;
    std::size_t index_ = 0;
};

}  // namespace

std::string to_string(const TensorShape& shape) {
    return std::to_string(shape.rows) + "x" + std::to_string(shape.cols) + "x" + std::to_string(shape.channels);
}

const char* to_string(ActivationKind kind) noexcept {
    switch (kind) {
        case ActivationKind::none: return "none";
        case ActivationKind::relu: return "relu";
        case ActivationKind::leaky_relu: return "leaky_relu";
    }
    return "none";
}

std::string_view layer_kind(const LayerSpec& layer) {
    return std::visit(overloaded{
                          [](const layers::Input&) { return std::string_view{"input"}; },
                          [](const layers::Conv2D&) { return std::string_view{"conv2d"}; },
                          [](const layers::Pool& p) {
                              return std::string_view{p.kind == layers::PoolKind::max ? "maxpool" : "avgpool"};
                          },
                          [](const layers::Dense&) { return std::string_view{"dense"}; },
                          [](const layers::BatchNorm&) { return std::string_view{"batchnorm"}; },
                          [](const layers::Flatten&) { return std::string_view{"flatten"}; },
                          [](const layers::GlobalAvgPool&) { return std::string_view{"globalavgpool"}; },
                          [](const layers::AddFrom&) { return std::string_view{"addfrom"}; },
                          [](const layers::LabelPoint&) { return std::string_view{"label"}; },
                          [](const layers::ActivationOnly&) { return std::string_view{"activation"}; },
                          [](const layers::ResBlock&) { return std::string_view{"resblock"}; },
                      },
                      layer);
}

std::string_view layer_branch(const LayerSpec& layer) {
    if (const auto* conv = std::get_if<layers::Conv2D>(&layer)) return conv->branch;
    if (const auto* bn = std::get_if<layers::BatchNorm>(&layer)) return bn->branch;
    return {};
}

bool ModelGraph::has_macros() const {
    for (const auto& layer : layers) {
        if (std::holds_alternative<layers::ResBlock>(layer)) return true;
    }
    return false;
}

ModelGraph validate_graph(ModelGraph graph) {
    Validator(graph).run();
    return graph;
}

ModelGraph normalize_graph(const ModelGraph& graph) {
    ModelGraph checked = validate_graph(graph);
    if (!checked.has_macros()) return checked;

    std::set<std::string, std::less<>> taken;
    for (const auto& layer : graph.layers) {
        if (const auto* point = std::get_if<layers::LabelPoint>(&layer)) taken.insert(point->label);
    }
    int counter = 0;
    auto fresh_label = [&] {
        std::string label;
        do {
            label = "rb" + std::to_string(++counter);
        } while (taken.contains(label));
        taken.insert(label);
        return label;
    };

    ModelGraph out;
    out.name = graph.name;
    out.layers.reserve(graph.layers.size() * 4);
    for (const auto& layer : graph.layers) {
        const auto* block = std::get_if<layers::ResBlock>(&layer);
        if (block == nullptr) {
            out.layers.push_back(layer);
            continue;
        }
        const std::int64_t stride = block->downsample ? 2 : 1;
        const std::string skip = fresh_label();

        layers::Conv2D first;
        first.filters = block->filters;
        first.geom = KernelGeometry{3, 3, stride, stride, 1, 1};
        first.activation = Activation::relu();

        layers::Conv2D second;
        second.filters = block->filters;
        second.geom = KernelGeometry{3, 3, 1, 1, 1, 1};

        out.layers.emplace_back(layers::LabelPoint{skip});
        out.layers.emplace_back(first);
        out.layers.emplace_back(layers::BatchNorm{});
        out.layers.emplace_back(second);
        out.layers.emplace_back(layers::BatchNorm{});
        if (block->downsample) {
            layers::Conv2D projection;
            projection.filters = block->filters;
            projection.geom = KernelGeometry{1, 1, 2, 2, 0, 0};
            projection.branch = skip;
            out.layers.emplace_back(projection);
            out.layers.emplace_back(layers::BatchNorm{skip});
        }
        out.layers.emplace_back(layers::AddFrom{skip});
        out.layers.emplace_back(layers::ActivationOnly{Activation::relu()});
    }
    return validate_graph(std::move(out));
}

}  // namespace greenprint
