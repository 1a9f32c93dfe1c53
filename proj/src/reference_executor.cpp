#include "greenprint/reference_executor.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

std::mt19937_64 layer_rng(std::uint64_t seed, std::size_t layer_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(layer_index), 0x6e6e6dU};
    return std::mt19937_64(seq);
}

double activate(const Activation& act, double x, OpCount& ops) {
    if (!act.is_active()) return x;
    ++ops.comparisons;
    if (x >= 0.0) return x;
    return act.kind == ActivationKind::relu ? 0.0 : act.alpha * x;
}

void check_desk_scale(const TensorShape& shape, std::size_t index) {
    if (shape.rows > kDeskScaleMaxDim || shape.cols > kDeskScaleMaxDim || shape.elements() > kDeskScaleMaxElements) {
        throw DeskScaleExceeded("layer " + std::to_string(index) + ": shape " + to_string(shape) +
                                " exceeds desk scale (rows, cols <= " + std::to_string(kDeskScaleMaxDim) +
                                ", elements <= " + std::to_string(kDeskScaleMaxElements) + ")");
    }
}

class Executor {
public:
    Executor(const ShapedGraph& graph, const ExecutorOptions& options) : graph_(graph), options_(options) {}

    ExecutionResult run(const Tensor& input) {
        for (std::size_t i = 0; i < graph_.shapes.size(); ++i) {
            check_desk_scale(graph_.shapes[i].input, i);
            check_desk_scale(graph_.shapes[i].output, i);
        }
        if (!(input.shape == graph_.shapes.front().output) ||
            input.data.size() != static_cast<std::size_t>(input.shape.elements())) {
            throw ExecutorShapeMismatch("input tensor " + to_string(input.shape) + " does not match model input " +
                                        to_string(graph_.shapes.front().output));
        }
        input_ = &input;

        ExecutionResult result;
        result.per_layer.reserve(graph_.graph.layers.size());
        for (index_ = 0; index_ < graph_.graph.layers.size(); ++index_) {
            const auto& layer = graph_.graph.layers[index_];
            const auto branch = layer_branch(layer);
            Tensor& slot = branch.empty() ? current_ : labelled_.at(std::string(branch));
            OpCount ops;
            Tensor out = std::visit([&](const auto& l) { return apply(l, slot, ops); }, layer);
            if (!(out.shape == graph_.shapes[index_].output)) {
                throw ExecutorShapeMismatch("layer " + std::to_string(index_) + ": executor produced " +
                                            to_string(out.shape) + ", expected " +
                                            to_string(graph_.shapes[index_].output));
            }
            slot = std::move(out);
            result.per_layer.push_back(ops);
        }
        result.output = current_;
        return result;
    }

private:
    LayerParameters params(std::int64_t weights, std::int64_t biases) const {
        return layer_parameters(index_, weights, biases, options_);
    }

    Tensor apply(const layers::Input&, const Tensor&, OpCount&) { return *input_; }

    Tensor apply(const layers::Conv2D& l, const Tensor& in, OpCount& ops) {
        const auto& g = l.geom;
        const std::int64_t C = in.shape.channels;
        const std::int64_t window = g.k_rows * g.k_cols * C;
        const auto p = params(l.filters * window, l.bias ? l.filters : 0);
        Tensor out(conv_output_shape(in.shape, g, l.filters));
        for (std::int64_t r = 0; r < out.shape.rows; ++r) {
            for (std::int64_t c = 0; c < out.shape.cols; ++c) {
                for (std::int64_t f = 0; f < l.filters; ++f) {
                    double acc = l.bias ? p.biases[static_cast<std::size_t>(f)] : 0.0;
                    const double* w = p.weights.data() + f * window;
                    for (std::int64_t kr = 0; kr < g.k_rows; ++kr) {
                        const std::int64_t ir = r * g.s_rows + kr - g.p_rows;
                        for (std::int64_t kc = 0; kc < g.k_cols; ++kc) {
                            const std::int64_t ic = c * g.s_cols + kc - g.p_cols;
                            const bool inside = ir >= 0 && ir < in.shape.rows && ic >= 0 && ic < in.shape.cols;
                            for (std::int64_t ch = 0; ch < C; ++ch) {
                                const double x = inside ? in.at(ir, ic, ch) : 0.0;
                                acc += w[(kr * g.k_cols + kc) * C + ch] * x;
                                ++ops.muls;
                                ++ops.adds;
                            }
                        }
                    }
                    out.at(r, c, f) = activate(l.activation, acc, ops);
                }
            }
        }
        return out;
    }

    Tensor apply(const layers::Pool& l, const Tensor& in, OpCount& ops) {
        const auto& g = l.geom;
        Tensor out(conv_output_shape(in.shape, g, in.shape.channels));
        const double window = static_cast<double>(g.k_rows * g.k_cols);
        for (std::int64_t r = 0; r < out.shape.rows; ++r) {
            for (std::int64_t c = 0; c < out.shape.cols; ++c) {
                for (std::int64_t ch = 0; ch < in.shape.channels; ++ch) {
                    double acc = in.at(r * g.s_rows, c * g.s_cols, ch);
                    for (std::int64_t kr = 0; kr < g.k_rows; ++kr) {
                        for (std::int64_t kc = 0; kc < g.k_cols; ++kc) {
                            if (kr == 0 && kc == 0) continue;
                            const double x = in.at(r * g.s_rows + kr, c * g.s_cols + kc, ch);
                            if (l.kind == layers::PoolKind::max) {
                                ++ops.comparisons;
                                acc = std::max(acc, x);
                            } else {
                                ++ops.adds;
                                acc += x;
                            }
                        }
                    }
                    if (l.kind == layers::PoolKind::avg) {
                        ++ops.adds;  // the division
                        acc /= window;
                    }
                    out.at(r, c, ch) = acc;
                }
            }
        }
        return out;
    }

    Tensor apply(const layers::Dense& l, const Tensor& in, OpCount& ops) {
        const std::int64_t is = in.shape.elements();
        const auto p = params(l.units * is, l.bias ? l.units : 0);
        Tensor out(TensorShape{1, 1, l.units});
        for (std::int64_t u = 0; u < l.units; ++u) {
            double acc = l.bias ? p.biases[static_cast<std::size_t>(u)] : 0.0;
            const double* w = p.weights.data() + u * is;
            for (std::int64_t i = 0; i < is; ++i) {
                acc += w[i] * in.data[static_cast<std::size_t>(i)];
                ++ops.muls;
                ++ops.adds;
            }
            out.data[static_cast<std::size_t>(u)] = activate(l.activation, acc, ops);
        }
        return out;
    }

    // Inference-form batchnorm: y = scale * x + shift per channel.
    Tensor apply(const layers::BatchNorm&, const Tensor& in, OpCount& ops) {
        const std::int64_t C = in.shape.channels;
        const auto p = params(C, C);
        Tensor out(in.shape);
        for (std::size_t i = 0; i < in.data.size(); ++i) {
            const auto ch = i % static_cast<std::size_t>(C);
            out.data[i] = p.weights[ch] * in.data[i] + p.biases[ch];
            ++ops.muls;
            ++ops.adds;
        }
        return out;
    }

    Tensor apply(const layers::Flatten&, const Tensor& in, OpCount&) {
        Tensor out = in;
        out.shape = TensorShape{1, 1, in.shape.elements()};
        return out;
    }

    Tensor apply(const layers::GlobalAvgPool&, const Tensor& in, OpCount& ops) {
        Tensor out(TensorShape{1, 1, in.shape.channels});
        const double count = static_cast<double>(in.shape.rows * in.shape.cols);
        for (std::int64_t ch = 0; ch < in.shape.channels; ++ch) {
            double acc = 0.0;
            for (std::int64_t r = 0; r < in.shape.rows; ++r) {
                for (std::int64_t c = 0; c < in.shape.cols; ++c) {
                    acc += in.at(r, c, ch);
                    ++ops.adds;
                }
            }
            out.data[static_cast<std::size_t>(ch)] = acc / count;
            ++ops.adds;
        }
        return out;
    }

    Tensor apply(const layers::AddFrom& l, const Tensor& in, OpCount& ops) {
        const Tensor& skip = labelled_.at(l.label);
        Tensor out = in;
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            out.data[i] += skip.data[i];
            ++ops.adds;
        }
        return out;
    }

    Tensor apply(const layers::LabelPoint& l, const Tensor& in, OpCount&) {
        labelled_[l.label] = in;
        return in;
    }

    Tensor apply(const layers::ActivationOnly& l, const Tensor& in, OpCount& ops) {
        Tensor out = in;
        for (auto& v : out.data) v = activate(l.activation, v, ops);
        return out;
    }

    Tensor apply(const layers::ResBlock&, const Tensor&, OpCount&) {
        throw ShapeError(ShapeErrorKind::UnexpandedMacro, index_, "resblock must be expanded before execution");
    }

    const ShapedGraph& graph_;
    const ExecutorOptions& options_;
    const Tensor* input_ = nullptr;
    std::size_t index_ = 0;
    Tensor current_;
    std::map<std::string, Tensor> labelled_;
};

}  // namespace

LayerParameters layer_parameters(std::size_t layer_index, std::int64_t weight_count, std::int64_t bias_count,
                                 const ExecutorOptions& options) {
    auto rng = layer_rng(options.seed, layer_index);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    LayerParameters p;
    p.weights.resize(static_cast<std::size_t>(weight_count));
    for (auto& w : p.weights) w = dist(rng);
    p.biases.resize(static_cast<std::size_t>(bias_count));
    for (auto& b : p.biases) b = options.zero_biases ? 0.0 : dist(rng);
    return p;
}

Tensor random_input(const TensorShape& shape, std::uint64_t seed) {
    auto rng = layer_rng(seed, static_cast<std::size_t>(-1));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor t(shape);
    for (auto& v : t.data) v = dist(rng);
    return t;
}

ExecutionResult execute_counting(const ShapedGraph& graph, const Tensor& input, const ExecutorOptions& options) {
    if (graph.shapes.size() != graph.graph.layers.size() || graph.shapes.empty()) {
        throw ExecutorShapeMismatch("shaped graph is inconsistent");
    }
    return Executor(graph, options).run(input);
}

const char* to_string(Agreement agreement) noexcept {
    switch (agreement) {
        case Agreement::ExactMatch: return "ExactMatch";
        case Agreement::FixedOffset: return "FixedOffset";
        case Agreement::FormulaMismatch: return "FormulaMismatch";
        case Agreement::NotModeled: return "NotModeled";
        case Agreement::Unexplained: return "Unexplained";
    }
    return "Unexplained";
}

bool DiscrepancyReport::all_expected() const {
    return std::none_of(layers.begin(), layers.end(),
                        [](const LayerDiscrepancy& d) { return d.agreement == Agreement::Unexplained; });
}

DiscrepancyReport compare_counts(const ShapedGraph& graph, const ModelCost& analytic, const std::vector<OpCount>& counted) {
    if (analytic.options.mode != CountingMode::paper_fidelity) {
        throw ParameterError("compare_counts requires a paper_fidelity cost");
    }
    const std::size_t n = graph.graph.layers.size();
    if (analytic.per_layer.size() != n || counted.size() != n) {
        throw ExecutorShapeMismatch("analytic and counted results cover different layer counts");
    }
    DiscrepancyReport report;
    report.layers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& layer = graph.graph.layers[i];
        const auto& cost = analytic.per_layer[i];
        const auto& ops = counted[i];
        LayerDiscrepancy d;
        d.layer_index = i;
        d.kind = std::string(layer_kind(layer));
        d.measured = ops;

        if (std::holds_alternative<layers::Conv2D>(layer)) {
            d.analytic = cost.flops - cost.activation_flops;
            d.counted = ops.counted_flops();
            d.expected_offset = graph.shapes[i].output.elements();
            d.difference = d.analytic - d.counted;
            d.agreement = d.difference == d.expected_offset ? Agreement::FixedOffset : Agreement::Unexplained;
        } else if (std::holds_alternative<layers::Pool>(layer)) {
            d.analytic = cost.flops;
            d.counted = ops.counted_flops() + ops.comparisons;
            d.difference = d.analytic - d.counted;
            d.agreement = Agreement::FormulaMismatch;
        } else {
            // Dense activations are charged one FLOP per output, which the
            // executor records as one comparison per output.
            d.analytic = cost.flops;
            d.counted = ops.counted_flops() + ops.comparisons;
            d.difference = d.analytic - d.counted;
            if (d.difference == 0) {
                d.agreement = Agreement::ExactMatch;
            } else if (d.analytic == 0 && !std::holds_alternative<layers::Dense>(layer)) {
                d.agreement = Agreement::NotModeled;
            } else {
                d.agreement = Agreement::Unexplained;
            }
        }
        report.layers.push_back(std::move(d));
    }
    return report;
}

}  // namespace greenprint
