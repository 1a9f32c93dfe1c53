#include "greenprint/shape_infer.hpp"

#include <map>
#include <string>

#include "greenprint/errors.hpp"

namespace greenprint {

std::int64_t conv_output_dim(std::int64_t input, std::int64_t kernel, std::int64_t padding, std::int64_t stride) {
    if (input < 1 || kernel < 1 || stride < 1 || padding < 0) {
        throw ParameterError("conv_output_dim: input, kernel, stride must be >= 1 and padding >= 0");
    }
    const std::int64_t span = input + 2 * padding;
    if (span < kernel) {
        throw ShapeError(ShapeErrorKind::DegenerateDim, ShapeError::npos,
                         "kernel " + std::to_string(kernel) + " exceeds padded extent " + std::to_string(span));
    }
    return (span - kernel) / stride + 1;
}

TensorShape conv_output_shape(const TensorShape& in, const KernelGeometry& geom, std::int64_t channels) {
    return TensorShape{conv_output_dim(in.rows, geom.k_rows, geom.p_rows, geom.s_rows),
                       conv_output_dim(in.cols, geom.k_cols, geom.p_cols, geom.s_cols), channels};
}

namespace {

class ShapePropagator {
public:
    explicit ShapePropagator(const ModelGraph& graph) : graph_(graph) {}

    std::vector<LayerShapes> run() {
        std::vector<LayerShapes> shapes;
        shapes.reserve(graph_.layers.size());
        for (index_ = 0; index_ < graph_.layers.size(); ++index_) {
            const auto& layer = graph_.layers[index_];
            const auto branch = layer_branch(layer);
            TensorShape& slot = branch.empty() ? current_ : labelled_.at(std::string(branch));
            const TensorShape in = slot;
            TensorShape out;
            try {
                out = std::visit([&](const auto& l) { return apply(l, in); }, layer);
            } catch (const ShapeError& e) {
                if (e.layer_index() == ShapeError::npos) throw e.at_layer(index_);
                throw;
            }
            slot = out;
            shapes.push_back({in, out});
        }
        return shapes;
    }

private:
    [[noreturn]] void fail(ShapeErrorKind kind, const std::string& detail) const {
        throw ShapeError(kind, index_, detail);
    }

    TensorShape apply(const layers::Input& l, const TensorShape&) { return l.shape; }
    TensorShape apply(const layers::Conv2D& l, const TensorShape& in) { return conv_output_shape(in, l.geom, l.filters); }
    TensorShape apply(const layers::Pool& l, const TensorShape& in) { return conv_output_shape(in, l.geom, in.channels); }
    TensorShape apply(const layers::Dense& l, const TensorShape& in) {
        if (!in.is_flat()) {
            fail(ShapeErrorKind::DenseOnUnflattenedInput,
                 "dense layer needs a flattened 1x1xN input, got " + to_string(in));
        }
        return TensorShape{1, 1, l.units};
    }
    TensorShape apply(const layers::BatchNorm&, const TensorShape& in) { return in; }
    TensorShape apply(const layers::Flatten&, const TensorShape& in) { return TensorShape{1, 1, in.elements()}; }
    TensorShape apply(const layers::GlobalAvgPool&, const TensorShape& in) { return TensorShape{1, 1, in.channels}; }
    TensorShape apply(const layers::AddFrom& l, const TensorShape& in) {
        const TensorShape& skip = labelled_.at(l.label);
        if (!(skip == in)) {
            fail(ShapeErrorKind::SkipShapeMismatch,
                 "label '" + l.label + "' has shape " + to_string(skip) + " but the running tensor is " + to_string(in));
        }
        return in;
    }
    TensorShape apply(const layers::LabelPoint& l, const TensorShape& in) {
        labelled_[l.label] = in;
        return in;
    }
    TensorShape apply(const layers::ActivationOnly&, const TensorShape& in) { return in; }
    TensorShape apply(const layers::ResBlock&, const TensorShape&) {
        fail(ShapeErrorKind::UnexpandedMacro, "resblock must be expanded by normalize_graph first");
    }

    const ModelGraph& graph_;
    std::size_t index_ = 0;
    TensorShape current_;
    std::map<std::string, TensorShape> labelled_;
};

}  // namespace

ShapedGraph infer_shapes(const ModelGraph& graph) {
    ModelGraph checked = validate_graph(graph);
    auto shapes = ShapePropagator(checked).run();
    return ShapedGraph{std::move(checked), std::move(shapes)};
}

}  // namespace greenprint
