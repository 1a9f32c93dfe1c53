#include "greenprint/complexity.hpp"

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw ParameterError("FLOP count overflows a 64-bit integer");
    return r;
}

std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw ParameterError("FLOP count overflows a 64-bit integer");
    return r;
}

// 2*C*Kr*Kc + 1: multiply-accumulates over one receptive field plus the bias term.
std::int64_t window_cost(const TensorShape& in, const KernelGeometry& geom) {
    return add(mul(mul(2, in.channels), mul(geom.k_rows, geom.k_cols)), 1);
}

std::string s(std::int64_t v) { return std::to_string(v); }

struct Costed {
    std::int64_t flops = 0;
    std::int64_t activation_flops = 0;
    std::string derivation;
};

class LayerCoster {
public:
    LayerCoster(const CostOptions& options, const TensorShape& in) : options_(options), in_(in) {}

    Costed operator()(const layers::Input&) const { return {0, 0, "0"}; }

    Costed operator()(const layers::Conv2D& l) const {
        const TensorShape out = conv_output_shape(in_, l.geom, l.filters);
        const std::int64_t window = window_cost(in_, l.geom);
        const std::int64_t total = flops_conv_layer(in_, l.geom, l.filters, l.activation, options_.relu_per_element);
        const std::int64_t core = mul(flops_conv_filter(in_, l.geom), l.filters);
        const std::string pf = s(out.rows) + "*" + s(out.cols) + "*(2*" + s(in_.channels) + "*" + s(l.geom.k_rows) + "*" +
                               s(l.geom.k_cols) + "+1)";
        std::string derivation;
        if (!l.activation.is_active()) {
            derivation = pf + "*" + s(l.filters);
        } else if (options_.relu_per_element) {
            derivation = pf + "*" + s(l.filters) + " + " + s(out.rows) + "*" + s(out.cols) + "*" + s(l.filters);
        } else {
            derivation = "(" + pf + " + " + s(window) + ")*" + s(l.filters);
        }
        return {total, total - core, derivation + " = " + s(total)};
    }

    Costed operator()(const layers::Pool& l) const {
        const TensorShape out = conv_output_shape(in_, l.geom, in_.channels);
        const std::int64_t total = flops_pool(in_, l.geom);
        return {total, 0,
                s(out.rows) + "*" + s(out.cols) + "*(2*" + s(in_.channels) + "*" + s(l.geom.k_rows) + "*" +
                    s(l.geom.k_cols) + "+1) = " + s(total)};
    }

    Costed operator()(const layers::Dense& l) const {
        const std::int64_t is = in_.elements();
        const std::int64_t total = flops_fc(is, l.units, l.activation);
        std::string derivation = "2*" + s(is) + "*" + s(l.units);
        if (l.activation.is_active()) derivation += " + " + s(l.units);
        return {total, l.activation.is_active() ? l.units : 0, derivation + " = " + s(total)};
    }

    Costed operator()(const layers::BatchNorm&) const {
        if (!extended()) return zero();
        const std::int64_t total = mul(2, in_.elements());
        return {total, 0, "2*" + s(in_.elements()) + " = " + s(total)};
    }

    Costed operator()(const layers::Flatten&) const { return {0, 0, "0"}; }

    Costed operator()(const layers::GlobalAvgPool&) const {
        if (!extended()) return zero();
        const std::int64_t total = add(in_.elements(), in_.channels);
        return {total, 0, s(in_.elements()) + " + " + s(in_.channels) + " = " + s(total)};
    }

    Costed operator()(const layers::AddFrom&) const { return per_element(false); }
    Costed operator()(const layers::LabelPoint&) const { return {0, 0, "0"}; }
    Costed operator()(const layers::ActivationOnly&) const { return per_element(true); }

    Costed operator()(const layers::ResBlock&) const {
        throw ShapeError(ShapeErrorKind::UnexpandedMacro, ShapeError::npos, "resblock must be expanded before costing");
    }

private:
    bool extended() const { return options_.mode == CountingMode::extended; }
    static Costed zero() { return {0, 0, "0 (not counted in paper_fidelity mode)"}; }
    Costed per_element(bool activation) const {
        if (!extended()) return zero();
        const std::int64_t total = in_.elements();
        return {total, activation ? total : 0, s(total)};
    }

    const CostOptions& options_;
    TensorShape in_;
};

}  // namespace

const char* to_string(CountingMode mode) noexcept {
    return mode == CountingMode::paper_fidelity ? "paper_fidelity" : "extended";
}

CountingMode counting_mode_from_string(std::string_view text) {
    if (text == "paper_fidelity" || text == "paper") return CountingMode::paper_fidelity;
    if (text == "extended") return CountingMode::extended;
    throw ParameterError("unknown counting mode '" + std::string(text) + "'");
}

std::int64_t flops_fc(std::int64_t input_size, std::int64_t output_size, const Activation& activation) {
    if (input_size < 1 || output_size < 1) throw ParameterError("flops_fc: sizes must be >= 1");
    const std::int64_t macs = mul(mul(2, input_size), output_size);
    return activation.is_active() ? add(macs, output_size) : macs;
}

std::int64_t flops_conv_filter(const TensorShape& in, const KernelGeometry& geom) {
    const TensorShape out = conv_output_shape(in, geom, 1);
    return mul(mul(out.rows, out.cols), window_cost(in, geom));
}

std::int64_t flops_conv_layer(const TensorShape& in, const KernelGeometry& geom, std::int64_t filters,
                              const Activation& activation, bool relu_per_element) {
    if (filters < 1) throw ParameterError("flops_conv_layer: filters must be >= 1");
    const std::int64_t per_filter = flops_conv_filter(in, geom);
    if (!activation.is_active()) return mul(per_filter, filters);
    if (relu_per_element) {
        const TensorShape out = conv_output_shape(in, geom, filters);
        return add(mul(per_filter, filters), out.elements());
    }
    return mul(add(per_filter, window_cost(in, geom)), filters);
}

std::int64_t flops_pool(const TensorShape& in, const KernelGeometry& geom) {
    if (geom.has_padding()) {
        throw GraphError(GraphErrorKind::PoolWithPadding, GraphError::npos, "pooling layers take no padding");
    }
    return flops_conv_filter(in, geom);
}

std::int64_t param_count(const LayerSpec& layer, const TensorShape& in) {
    if (const auto* conv = std::get_if<layers::Conv2D>(&layer)) {
        const std::int64_t per_filter = add(mul(in.channels, mul(conv->geom.k_rows, conv->geom.k_cols)), conv->bias ? 1 : 0);
        return mul(conv->filters, per_filter);
    }
    if (const auto* dense = std::get_if<layers::Dense>(&layer)) {
        return mul(dense->units, add(in.elements(), dense->bias ? 1 : 0));
    }
    if (std::holds_alternative<layers::BatchNorm>(layer)) return mul(2, in.channels);
    return 0;
}

ModelCost model_cost(const ShapedGraph& graph, const CostOptions& options) {
    ModelCost cost;
    cost.options = options;
    cost.per_layer.reserve(graph.graph.layers.size());
    for (std::size_t i = 0; i < graph.graph.layers.size(); ++i) {
        const auto& layer = graph.graph.layers[i];
        const auto& shapes = graph.shapes.at(i);
        Costed c;
        try {
            c = std::visit(LayerCoster(options, shapes.input), layer);
        } catch (const ShapeError& e) {
            throw e.at_layer(i);
        }
        LayerCost lc;
        lc.layer_index = i;
        lc.flops = c.flops;
        lc.activation_flops = c.activation_flops;
        lc.params = param_count(layer, shapes.input);
        lc.output_shape = shapes.output;
        lc.derivation = std::move(c.derivation);
        cost.total_flops = add(cost.total_flops, lc.flops);
        cost.total_params = add(cost.total_params, lc.params);
        cost.per_layer.push_back(std::move(lc));
    }
    return cost;
}

}  // namespace greenprint
