// greenprint: static FLOPs, energy and carbon accounting for CNN descriptions.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "greenprint/arch.hpp"
#include "greenprint/complexity.hpp"
#include "greenprint/energy_carbon.hpp"
#include "greenprint/errors.hpp"
#include "greenprint/model_dsl.hpp"
#include "greenprint/model_zoo.hpp"
#include "greenprint/reference_executor.hpp"
#include "greenprint/report.hpp"
#include "greenprint/shape_infer.hpp"

namespace fs = std::filesystem;
using namespace greenprint;

namespace {

constexpr std::string_view kZooPrefix = "zoo:";

struct LoadedModel {
    std::string source;
    std::string text;  // canonical or on-disk text, digested into reports
    std::optional<ModelGraph> graph;
    const ZooEntry* zoo = nullptr;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedModel load_model(const std::string& ref) {
    LoadedModel m;
    m.source = ref;
    if (ref.rfind(kZooPrefix, 0) == 0) {
        m.zoo = &get_model(ref.substr(kZooPrefix.size()));
        if (m.zoo->graph) {
            m.graph = *m.zoo->graph;
            m.text = serialize_model(*m.graph);
        } else {
            m.text = m.zoo->name;
        }
        return m;
    }
    m.text = read_file(ref);
    m.graph = parse_model(m.text);
    return m;
}

const ModelGraph& require_graph(const LoadedModel& m) {
    if (!m.graph) throw ParameterError("model '" + m.source + "' is metadata-only and has no graph");
    return *m.graph;
}

std::int64_t parse_flops(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParameterError("--flops: '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v) || v < 0.0 || v > 9.0e18 || std::floor(v) != v) {
        throw ParameterError("--flops must be a non-negative integer count, got '" + text + "'");
    }
    return static_cast<std::int64_t>(v);
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + out_path + "'");
    out << content;
}

// Built-in defaults < greenprint.conf < command-line flags.
struct EnergyFlags {
    std::string config;
    std::optional<double> gpu_eff;
    std::optional<double> carbon_intensity;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config, "Defaults file (key=value: gpu_efficiency, carbon_intensity)");
        cmd->add_option("--gpu-eff", gpu_eff, "Device efficiency in FLOPs per joule");
        cmd->add_option("--carbon-intensity", carbon_intensity, "Grid carbon intensity in g CO2eq/kWh");
    }

    EnergyParams resolve() const {
        EnergyParams params;
        if (!config.empty()) {
            params = load_energy_config(config, params);
        } else if (fs::exists(kConfigFileName)) {
            params = load_energy_config(std::string(kConfigFileName), params);
        }
        if (gpu_eff) params.gpu_efficiency = *gpu_eff;
        if (carbon_intensity) params.carbon_intensity = *carbon_intensity;
        params.validate();
        return params;
    }
};

struct TrainingFlags {
    std::optional<std::int64_t> samples;
    std::optional<double> epochs;
    std::string category;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--samples", samples, "Training samples per epoch (default 15723)");
        auto* e = cmd->add_option("--epochs", epochs, "Epochs (may be fractional, e.g. a category mean)");
        cmd->add_option("--category", category, "random|narrow|wide|within|mean: take epochs from the zoo schedule")
            ->excludes(e);
    }

    // Epoch schedule comes from `schedule_model`, a zoo model name.
    TrainingConfig resolve(const std::string& schedule_model, std::string& epochs_source) const {
        TrainingConfig cfg;
        cfg.training_samples = kTrainingSamples;
        cfg.batch_size = kBatchSize;
        if (epochs) {
            cfg.epochs = *epochs;
            epochs_source = "explicit";
        } else {
            const std::string cat = category.empty() ? "mean" : category;
            if (schedule_model.empty()) {
                throw ParameterError("--epochs or --category (with a zoo model) is required");
            }
            cfg.epochs = default_training_config(category_from_string(cat), schedule_model).epochs;
            epochs_source = "zoo:" + schedule_model + ":" + cat;
        }
        if (samples) cfg.training_samples = *samples;
        cfg.validate();
        return cfg;
    }
};

std::string schedule_model_for(const LoadedModel* m, const std::string& category) {
    if (m != nullptr && m->zoo != nullptr && m->zoo->epochs_by_category) return m->zoo->name;
    // A bare category with no zoo model uses the PirnatEco schedule.
    if (!category.empty()) return "pirnateco";
    return {};
}

ModelCost cost_of(const ModelGraph& graph, const CostOptions& options, ShapedGraph* shaped_out = nullptr) {
    ShapedGraph shaped = infer_shapes(normalize_graph(graph));
    ModelCost cost = model_cost(shaped, options);
    if (shaped_out != nullptr) *shaped_out = std::move(shaped);
    return cost;
}

// FLOPs for energy/projection: explicit flag, else analysis of the graph,
// else the published figure of a metadata-only zoo entry.
std::int64_t resolve_flops(const std::string& flops_flag, const std::optional<LoadedModel>& model, bool published) {
    if (!flops_flag.empty()) return parse_flops(flops_flag);
    if (!model) throw ParameterError("either a model or --flops is required");
    if (model->zoo != nullptr && (published || !model->graph)) {
        if (!model->zoo->published_flops) {
            throw ParameterError("zoo model '" + model->zoo->name + "' has no published FLOPs");
        }
        return *model->zoo->published_flops;
    }
    return cost_of(require_graph(*model), {}).total_flops;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greenprint: FLOPs, energy and CO2 accounting for convolutional networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Per-layer FLOPs and parameter report");
    std::string a_model, a_mode = "paper_fidelity", a_format = "json", a_out;
    bool a_relu_per_element = false, a_energy = false;
    std::optional<std::int64_t> a_predictions;
    EnergyFlags a_eflags;
    TrainingFlags a_tflags;
    analyze->add_option("model", a_model, "Model file (.nnm) or zoo:<name>")->required();
    analyze->add_option("--mode", a_mode, "paper_fidelity|extended")->check(CLI::IsMember({"paper_fidelity", "paper", "extended"}));
    analyze->add_option("--format", a_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    analyze->add_option("--out", a_out, "Write the report to a file instead of stdout");
    analyze->add_flag("--relu-per-element", a_relu_per_element, "Charge conv activations one FLOP per output element");
    analyze->add_flag("--energy", a_energy, "Include a training energy section");
    analyze->add_option("--predictions", a_predictions, "Include a prediction carbon projection up to N");
    a_eflags.add_to(analyze);
    a_tflags.add_to(analyze);

    // energy
    auto* energy = app.add_subcommand("energy", "Training energy and carbon");
    std::string e_model, e_flops, e_out;
    bool e_published = false;
    EnergyFlags e_eflags;
    TrainingFlags e_tflags;
    energy->add_option("model", e_model, "Model file (.nnm) or zoo:<name>");
    energy->add_option("--flops", e_flops, "Forward-pass FLOPs (e.g. 345e6)");
    energy->add_flag("--published-flops", e_published, "Use the zoo entry's published FLOPs");
    energy->add_option("--out", e_out, "Output file");
    e_eflags.add_to(energy);
    e_tflags.add_to(energy);

    // project
    auto* project = app.add_subcommand("project", "Carbon of n predictions, log-spaced CSV (n,joules,grams)");
    std::string p_model, p_flops, p_out;
    bool p_published = false;
    std::optional<std::int64_t> p_predictions;
    std::optional<double> p_users;
    double p_rate = 1.0;
    EnergyFlags p_eflags;
    project->add_option("model", p_model, "Model file (.nnm) or zoo:<name>");
    project->add_option("--flops", p_flops, "Forward-pass FLOPs");
    project->add_flag("--published-flops", p_published, "Use the zoo entry's published FLOPs");
    auto* pred_opt = project->add_option("--predictions", p_predictions, "Predictions per year");
    auto* users_opt = project->add_option("--users", p_users, "Users; annual predictions = users * rate * 8760");
    project->add_option("--per-user-per-hour", p_rate, "Predictions per user per hour (default 1)");
    pred_opt->excludes(users_opt);
    project->add_option("--out", p_out, "Output file");
    p_eflags.add_to(project);

    // validate
    auto* validate = app.add_subcommand("validate", "Check analytic FLOPs against the counting executor");
    std::string v_model, v_out;
    std::uint64_t v_seed = 0;
    validate->add_option("model", v_model, "Model file (.nnm) or zoo:<name>")->required();
    validate->add_option("--seed", v_seed, "Seed for weights and input");
    validate->add_option("--out", v_out, "Output file");

    // solve-gpu-eff
    auto* solve = app.add_subcommand("solve-gpu-eff", "Back-solve device efficiency from a training energy");
    std::string s_flops;
    std::int64_t s_samples = kTrainingSamples;
    double s_epochs = 0.0, s_energy_kj = 0.0;
    solve->add_option("--flops", s_flops, "Forward-pass FLOPs")->required();
    solve->add_option("--samples", s_samples, "Training samples (default 15723)");
    solve->add_option("--epochs", s_epochs, "Epochs")->required();
    solve->add_option("--energy-kj", s_energy_kj, "Training energy in kJ")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "MDE and RMSE of a prediction CSV (x,y,z,x~,y~,z~)");
    std::string ev_file;
    evaluate->add_option("file", ev_file, "Prediction file")->required();

    // zoo
    auto* zoo_cmd = app.add_subcommand("zoo", "List built-in models");
    std::string z_export;
    std::string z_out;
    zoo_cmd->add_option("--export", z_export, "Print the canonical .nnm text of a zoo graph");
    zoo_cmd->add_option("--out", z_out, "Write to this path instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ExitCode::parameter);
    }

    try {
        if (*analyze) {
            const auto model = load_model(a_model);
            AnalysisReport report;
            report.model_name = require_graph(model).name;
            report.source = model.source;
            report.input_digest = sha256_hex(model.text);
            CostOptions options{counting_mode_from_string(a_mode), a_relu_per_element};
            report.cost = cost_of(require_graph(model), options, &report.shaped);

            if (a_energy || a_predictions) {
                EnergySection section;
                section.params = a_eflags.resolve();
                section.m_flops = options.mode == CountingMode::paper_fidelity && !options.relu_per_element
                                      ? report.cost.total_flops
                                      : cost_of(require_graph(model), {}).total_flops;
                std::string schedule = schedule_model_for(&model, a_tflags.category);
                if (schedule.empty()) schedule = "pirnateco";
                section.config = a_tflags.resolve(schedule, section.epochs_source);
                section.report = energy_training(section.m_flops, section.config, section.params);
                report.energy = section;
                if (a_predictions) report.projection = project_carbon(section.m_flops, *a_predictions, section.params);
            }

            if (a_format == "csv") {
                emit(analysis_csv(report), a_out);
            } else {
                auto j = analysis_json(report);
                if (model.zoo != nullptr) {
                    nlohmann::json published;
                    if (model.zoo->published_weights) published["weights"] = *model.zoo->published_weights;
                    if (model.zoo->published_flops) published["flops"] = *model.zoo->published_flops;
                    if (model.zoo->published_energy_kj) published["energy_kj"] = *model.zoo->published_energy_kj;
                    if (model.zoo->published_carbon_g) published["carbon_g"] = *model.zoo->published_carbon_g;
                    j["published"] = published;
                }
                emit(dump_json(j), a_out);
            }
        } else if (*energy) {
            std::optional<LoadedModel> model;
            if (!e_model.empty()) model = load_model(e_model);
            EnergySection section;
            section.params = e_eflags.resolve();
            section.m_flops = resolve_flops(e_flops, model, e_published);
            section.config = e_tflags.resolve(schedule_model_for(model ? &*model : nullptr, e_tflags.category),
                                              section.epochs_source);
            section.report = energy_training(section.m_flops, section.config, section.params);
            auto j = energy_json(section);
            if (model) j["model"] = model->source;
            emit(dump_json(j), e_out);
        } else if (*project) {
            std::optional<LoadedModel> model;
            if (!p_model.empty()) model = load_model(p_model);
            const EnergyParams params = p_eflags.resolve();
            const std::int64_t flops = resolve_flops(p_flops, model, p_published);
            std::int64_t n = 0;
            if (p_predictions) {
                n = *p_predictions;
            } else if (p_users) {
                n = annual_predictions(*p_users, p_rate);
            } else {
                throw ParameterError("--predictions or --users is required");
            }
            emit(projection_csv(project_carbon(flops, n, params)), p_out);
        } else if (*validate) {
            const auto model = load_model(v_model);
            const ShapedGraph shaped = infer_shapes(normalize_graph(require_graph(model)));
            const ModelCost cost = model_cost(shaped, {});
            const Tensor input = random_input(shaped.shapes.front().output, v_seed);
            const auto run = execute_counting(shaped, input, ExecutorOptions{v_seed, false});
            const auto discrepancies = compare_counts(shaped, cost, run.per_layer);
            auto j = discrepancy_json(discrepancies);
            j["model"] = shaped.graph.name;
            j["seed"] = v_seed;
            emit(dump_json(j), v_out);
            if (!discrepancies.all_expected()) return static_cast<int>(ExitCode::verification);
        } else if (*solve) {
            TrainingConfig cfg;
            cfg.training_samples = s_samples;
            cfg.epochs = s_epochs;
            if (!(s_energy_kj > 0.0)) throw ParameterError("--energy-kj must be > 0");
            const std::int64_t flops = parse_flops(s_flops);
            const double g = backsolve_gpu_efficiency(flops, cfg, s_energy_kj * 1000.0);
            nlohmann::json j = {
                {"gpu_efficiency_flops_per_joule", g},
                {"display", format_significant(g, 4)},
                {"inputs", {{"flops", flops}, {"training_samples", s_samples}, {"epochs", s_epochs}, {"energy_kj", s_energy_kj}}},
            };
            std::cout << dump_json(j);
        } else if (*evaluate) {
            const auto result = evaluate_predictions(read_file(ev_file));
            nlohmann::json j = {{"rows", result.rows}, {"mde_m", result.mde}, {"rmse_m", result.rmse}};
            std::cout << dump_json(j);
        } else if (*zoo_cmd) {
            if (!z_export.empty()) {
                const auto& entry = get_model(z_export);
                if (!entry.graph) throw ParameterError("zoo model '" + entry.name + "' is metadata only");
                emit(serialize_model(*entry.graph), z_out);
                return 0;
            }
            for (const auto& entry : list_models()) {
                std::cout << entry.name << "\tgraph=" << (entry.has_graph ? "true" : "false")
                          << "\tmetadata=" << (entry.has_metadata ? "true" : "false") << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::parameter);
    }
    return 0;
}
