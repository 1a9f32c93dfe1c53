#pragma once

#include <cstdint>
#include <vector>

#include "greenprint/arch.hpp"

namespace greenprint {

struct LayerShapes {
    TensorShape input;
    TensorShape output;
    friend bool operator==(const LayerShapes&, const LayerShapes&) = default;
};

struct ShapedGraph {
    ModelGraph graph;
    std::vector<LayerShapes> shapes;  // one entry per layer
};

// Number of kernel placements along one axis: floor((i - k + 2p) / s) + 1.
// Throws ShapeError{DegenerateDim} when i + 2p < k.
std::int64_t conv_output_dim(std::int64_t input, std::int64_t kernel, std::int64_t padding, std::int64_t stride);

TensorShape conv_output_shape(const TensorShape& in, const KernelGeometry& geom, std::int64_t channels);

// Propagates shapes through a normalized graph. Layers with a branch label
// read (and rebind) the labelled tensor; every other layer reads the running
// tensor. Errors carry the offending layer index.
ShapedGraph infer_shapes(const ModelGraph& graph);

}  // namespace greenprint
