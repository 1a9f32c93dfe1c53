// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "greenprint/complexity.hpp"
#include "greenprint/energy_carbon.hpp"
#include "greenprint/model_dsl.hpp"
#include "greenprint/model_zoo.hpp"
#include "greenprint/reference_executor.hpp"
#include "greenprint/report.hpp"
#include "greenprint/shape_infer.hpp"
#include "oracles.hpp"

using namespace greenprint;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

Outcome carbon_conversion() {
    Outcome o;
    const double cases[][2] = {{152, 10.6}, {264, 18.3}, {2547, 176.9}};
    std::ostringstream d;
    for (const auto& c : cases) {
        const double g = carbon_from_energy(c[0] * 1000, 250);
        o.require(std::fabs(g - c[1]) <= 0.05, fmt("%.0f kJ -> %.4f g, expected %.1f", c[0], g, c[1]));
        d << c[0] << " kJ->" << format_significant(g, 4) << " g  ";
    }
    if (o.pass) o.detail = d.str();
    return o;
}

Outcome cross_consistency() {
    Outcome o;
    const double g = backsolve_gpu_efficiency(345'000'000, {15723, 33.75, 32}, 152'000);
    const double chin = energy_training(535'000'000, {15723, 37.75, 32}, {g, 250}).e_training;
    const double cerar = energy_training(2'479'000'000, {15723, 78.75, 32}, {g, 250}).e_training;
    o.require(rel(chin, 264'000) < 0.01, fmt("chin %.0f J vs 264000 J", chin));
    o.require(rel(cerar, 2'547'000) < 0.01, fmt("cerar %.0f J vs 2547000 J", cerar));
    if (o.pass) {
        o.detail = fmt("g=%.5g FLOPs/J; 264 kJ rel err %.3f%%; ", g, 100 * rel(chin, 264'000)) +
                   fmt("2547 kJ rel err %.3f%%", 100 * rel(cerar, 2'547'000));
    }
    return o;
}

Outcome pirnateco_reconstruction() {
    Outcome o;
    const auto shaped = infer_shapes(normalize_graph(get_model("pirnateco").graph.value()));
    const auto cost = model_cost(shaped);
    o.require(rel(static_cast<double>(cost.total_params), 3.1e6) <= 0.10, fmt("params %.0f", cost.total_params));
    o.require(rel(static_cast<double>(cost.total_flops), 345e6) <= 0.10, fmt("flops %.0f", cost.total_flops));
    for (const auto& l : cost.per_layer) {
        const auto tail = " = " + std::to_string(l.flops);
        const bool documented = l.flops == 0 || (l.derivation.size() > tail.size() &&
                                                 l.derivation.compare(l.derivation.size() - tail.size(), tail.size(), tail) == 0);
        o.require(documented, "layer " + std::to_string(l.layer_index) + " has no derivation");
    }
    if (o.pass) {
        o.detail = fmt("params %.0f (%+.2f%% vs 3.1M), ", cost.total_params, 100 * (cost.total_params - 3.1e6) / 3.1e6) +
                   fmt("flops %.0f (%+.2f%% vs 345M)", cost.total_flops, 100 * (cost.total_flops - 345e6) / 345e6);
    }
    return o;
}

Outcome formula_vs_oracle() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    int dense = 0, conv = 0, pool = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto graph = testing::random_desk_graph(rng);
        const auto shaped = infer_shapes(graph);
        const auto cost = model_cost(shaped);
        const auto run = execute_counting(shaped, random_input(shaped.shapes.front().output, trial), {std::uint64_t(trial), false});
        const auto report = compare_counts(shaped, cost, run.per_layer);
        const std::string where = "graph " + std::to_string(trial) + " layer ";

        for (std::size_t i = 0; i < graph.layers.size(); ++i) {
            const auto& ops = run.per_layer[i];
            const auto& lc = cost.per_layer[i];
            const auto agreement = report.layers[i].agreement;
            o.require(agreement != Agreement::Unexplained, where + std::to_string(i) + " unexplained");
            if (std::holds_alternative<layers::Dense>(graph.layers[i])) {
                ++dense;
                o.require(lc.flops == ops.muls + ops.adds + ops.comparisons && agreement == Agreement::ExactMatch,
                          where + std::to_string(i) + " dense mismatch");
            } else if (const auto* c = std::get_if<layers::Conv2D>(&graph.layers[i])) {
                ++conv;
                const auto& in = shaped.shapes[i].input;
                // output elements from window enumeration, not from the library
                const std::int64_t outputs = testing::window_count(in.rows, c->geom.k_rows, c->geom.p_rows, c->geom.s_rows) *
                                             testing::window_count(in.cols, c->geom.k_cols, c->geom.p_cols, c->geom.s_cols) *
                                             c->filters;
                const std::int64_t core = lc.flops - lc.activation_flops;
                o.require(core == ops.muls + ops.adds + outputs && agreement == Agreement::FixedOffset,
                          where + std::to_string(i) + " conv offset is not one per output element");
                if (!c->activation.is_active()) o.require(lc.flops == ops.counted_flops() + outputs, where + "conv total");
            } else if (std::holds_alternative<layers::Pool>(graph.layers[i])) {
                ++pool;
                o.require(agreement == Agreement::FormulaMismatch, where + std::to_string(i) + " pool not FormulaMismatch");
            } else {
                o.require(agreement != Agreement::FormulaMismatch && agreement != Agreement::FixedOffset,
                          where + std::to_string(i) + " unexpected classification");
            }
        }
    }
    if (o.pass) {
        o.detail = std::to_string(dense) + " dense exact, " + std::to_string(conv) + " conv +1/output (activation term excluded), " +
                   std::to_string(pool) + " pool FormulaMismatch";
    }
    return o;
}

Outcome fleet_projection() {
    Outcome o;
    const auto n = annual_predictions(7.4e9);
    o.require(rel(static_cast<double>(n), 6.48e13) < 0.01, fmt("annual predictions %.4g", static_cast<double>(n)));
    o.require(std::llround(static_cast<double>(n) / 1e12) == 65, "does not round to 65e12");
    const EnergyParams params{};
    const auto p = project_carbon(345'000'000, n, params);
    const double per = energy_prediction(345'000'000, 1, params);
    for (std::size_t i = 0; i < p.curve.size(); ++i) {
        const auto& pt = p.curve[i];
        if (i > 0) o.require(pt.predictions > p.curve[i - 1].predictions && pt.grams > p.curve[i - 1].grams, "curve not monotone");
        o.require(rel(pt.joules, per * static_cast<double>(pt.predictions)) < 1e-12, "curve not linear in n");
        o.require(rel(pt.grams, carbon_from_energy(pt.joules, 250)) < 1e-12, "grams inconsistent with carbon conversion");
    }
    o.require(p.curve.back().predictions == n, "final row is not the annual total");
    if (o.pass) {
        o.detail = fmt("N=%.4g predictions/year, final row %.4g g at 345 MFLOPs, %.0f rows", static_cast<double>(n),
                       p.annual.grams, static_cast<double>(p.curve.size()));
    }
    return o;
}

Outcome parser_round_trip() {
    Outcome o;
    std::mt19937_64 rng(77);
    for (int i = 0; i < 500; ++i) {
        const auto g = testing::random_dsl_graph(rng);
        const auto text = serialize_model(g);
        const auto again = serialize_model(parse_model(text));
        o.require(again == text, "graph " + std::to_string(i) + " changed on round trip");
    }
    if (o.pass) o.detail = "500 graphs byte-identical";
    return o;
}

Outcome prediction_errors() {
    Outcome o;
    const auto hand = evaluate_predictions("0,0,0,3,0,0\n0,0,0,0,4,0\n");
    o.require(std::fabs(hand.mde - 3.5) <= 1e-9, fmt("MDE %.12f", hand.mde));
    o.require(std::fabs(hand.rmse - std::sqrt(12.5)) <= 1e-9, fmt("RMSE %.12f", hand.rmse));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-100, 100);
    std::uniform_int_distribution<int> rows(1, 20);
    for (int f = 0; f < 1000; ++f) {
        std::string text = f % 2 ? "x,y,z,x~,y~,z~\n" : "";
        for (int r = rows(rng); r > 0; --r)
            for (int k = 0; k < 6; ++k) text += std::to_string(coord(rng)) + (k < 5 ? "," : "\n");
        const auto e = evaluate_predictions(text);
        o.require(e.rmse >= e.mde - 1e-12 * std::max(1.0, e.mde), "file " + std::to_string(f) + " has RMSE < MDE");
    }
    if (o.pass) o.detail = fmt("hand oracle MDE %.9f RMSE %.9f; 1000 files RMSE >= MDE", hand.mde, hand.rmse);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"carbon conversion exactness", carbon_conversion},
        {"energy cross-consistency", cross_consistency},
        {"reconstructed network size", pirnateco_reconstruction},
        {"formula vs counting executor", formula_vs_oracle},
        {"fleet projection", fleet_projection},
        {"parser round trip", parser_round_trip},
        {"MDE/RMSE utility", prediction_errors},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1f ms]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), ms);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
