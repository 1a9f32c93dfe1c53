#include "greenprint/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

nlohmann::json shape_json(const TensorShape& s) { return nlohmann::json::array({s.rows, s.cols, s.channels}); }

std::string csv_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

std::string format_significant(double value, int digits) {
    if (!std::isfinite(value)) return value != value ? "nan" : (value > 0 ? "inf" : "-inf");
    if (value == 0.0) return "0";
    if (digits < 1) digits = 1;
    int exponent = static_cast<int>(std::floor(std::log10(std::fabs(value))));
    const double scale = std::pow(10.0, exponent - digits + 1);
    const double rounded = std::round(value / scale) * scale;
    exponent = static_cast<int>(std::floor(std::log10(std::fabs(rounded))));
    const int decimals = std::max(0, digits - 1 - exponent);
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, rounded);
    return buf.data();
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

EnergyParams parse_energy_config(std::string_view text, EnergyParams base) {
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = std::string(kConfigFileName) + " line " + std::to_string(line_no);
        if (eq == std::string_view::npos) throw ParameterError(where + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = parse_double(line.substr(eq + 1));
        if (!value || *value <= 0.0) throw ParameterError(where + ": value must be a positive number");
        if (key == "gpu_efficiency") {
            base.gpu_efficiency = *value;
        } else if (key == "carbon_intensity") {
            base.carbon_intensity = *value;
        } else {
            throw ParameterError(where + ": unknown key '" + std::string(key) + "'");
        }
    }
    return base;
}

EnergyParams load_energy_config(const std::filesystem::path& path, EnergyParams base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_energy_config(ss.str(), base);
}

PredictionErrors evaluate_predictions(std::string_view text) {
    double sum_distance = 0.0;
    double sum_squared = 0.0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool first_content_row = true;

    for (auto raw : split(text, '\n')) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        std::array<double, 6> v{};
        bool numeric = fields.size() == 6;
        for (std::size_t i = 0; numeric && i < 6; ++i) {
            const auto d = parse_double(fields[i]);
            numeric = d.has_value();
            if (numeric) v[i] = *d;
        }
        if (!numeric) {
            bool any_numeric = false;
            for (auto f : fields) any_numeric = any_numeric || parse_double(f).has_value();
            if (first_content_row && !any_numeric) {
                first_content_row = false;  // header
                continue;
            }
            throw ParseError(ParseErrorKind::MalformedRow, line_no, 1,
                             "malformed row: expected 6 finite comma-separated numbers x,y,z,x~,y~,z~");
        }
        first_content_row = false;
        const double dx = v[0] - v[3];
        const double dy = v[1] - v[4];
        const double dz = v[2] - v[5];
        const double squared = dx * dx + dy * dy + dz * dz;
        sum_squared += squared;
        sum_distance += std::sqrt(squared);
        ++rows;
    }
    if (rows == 0) throw ParseError(ParseErrorKind::MalformedRow, std::max<std::size_t>(line_no, 1), 1, "no prediction rows");

    PredictionErrors out;
    out.rows = rows;
    out.mde = sum_distance / static_cast<double>(rows);
    out.rmse = std::sqrt(sum_squared / static_cast<double>(rows));
    return out;
}

nlohmann::json energy_json(const EnergySection& s) {
    nlohmann::json j;
    j["inputs"] = {
        {"flops", s.m_flops},
        {"training_samples", s.config.training_samples},
        {"epochs", s.config.epochs},
        {"epochs_source", s.epochs_source},
        {"batch_size", s.config.batch_size},
        {"gpu_efficiency_flops_per_joule", s.params.gpu_efficiency},
        {"carbon_intensity_g_per_kwh", s.params.carbon_intensity},
    };
    j["joules"] = {
        {"forward", s.report.e_forward},
        {"backward", s.report.e_backward},
        {"training", s.report.e_training},
    };
    j["carbon_training_g"] = s.report.carbon_training;
    j["display"] = {
        {"e_forward_kj", format_significant(s.report.e_forward / 1000.0)},
        {"e_backward_kj", format_significant(s.report.e_backward / 1000.0)},
        {"e_training_kj", format_significant(s.report.e_training / 1000.0)},
        {"carbon_training_g", format_significant(s.report.carbon_training)},
    };
    return j;
}

nlohmann::json projection_json(const CarbonProjection& projection, std::int64_t m_flops, const EnergyParams& params) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : projection.curve) {
        curve.push_back({{"predictions", p.predictions}, {"joules", p.joules}, {"grams", p.grams}});
    }
    return {
        {"flops", m_flops},
        {"gpu_efficiency_flops_per_joule", params.gpu_efficiency},
        {"carbon_intensity_g_per_kwh", params.carbon_intensity},
        {"curve", std::move(curve)},
        {"annual", {{"predictions", projection.annual.predictions},
                    {"joules", projection.annual.joules},
                    {"grams", projection.annual.grams},
                    {"display_tonnes", format_significant(projection.annual.grams / 1e6)}}},
    };
}

nlohmann::json analysis_json(const AnalysisReport& r) {
    nlohmann::json layers_json = nlohmann::json::array();
    for (std::size_t i = 0; i < r.cost.per_layer.size(); ++i) {
        const auto& lc = r.cost.per_layer[i];
        const auto& layer = r.shaped.graph.layers[i];
        nlohmann::json l = {
            {"index", lc.layer_index},
            {"kind", std::string(layer_kind(layer))},
            {"input_shape", shape_json(r.shaped.shapes[i].input)},
            {"output_shape", shape_json(lc.output_shape)},
            {"params", lc.params},
            {"flops", lc.flops},
            {"activation_flops", lc.activation_flops},
            {"derivation", lc.derivation},
        };
        if (const auto branch = layer_branch(layer); !branch.empty()) l["branch"] = std::string(branch);
        layers_json.push_back(std::move(l));
    }
    nlohmann::json j = {
        {"tool", std::string(kToolName)},
        {"version", std::string(kToolVersion)},
        {"model", r.model_name},
        {"source", r.source},
        {"input_digest", "sha256:" + r.input_digest},
        {"mode", to_string(r.cost.options.mode)},
        {"relu_per_element", r.cost.options.relu_per_element},
        {"layers", std::move(layers_json)},
        {"totals", {{"flops", r.cost.total_flops}, {"params", r.cost.total_params}, {"layer_count", r.cost.per_layer.size()}}},
    };
    if (r.energy) j["energy"] = energy_json(*r.energy);
    if (r.projection && r.energy) j["projection"] = projection_json(*r.projection, r.energy->m_flops, r.energy->params);
    return j;
}

std::string analysis_csv(const AnalysisReport& r) {
    std::ostringstream out;
    out << "index,kind,out_rows,out_cols,out_channels,params,flops\n";
    for (std::size_t i = 0; i < r.cost.per_layer.size(); ++i) {
        const auto& lc = r.cost.per_layer[i];
        out << lc.layer_index << ',' << layer_kind(r.shaped.graph.layers[i]) << ',' << lc.output_shape.rows << ','
            << lc.output_shape.cols << ',' << lc.output_shape.channels << ',' << lc.params << ',' << lc.flops << '\n';
    }
    out << "total,,,,," << r.cost.total_params << ',' << r.cost.total_flops << '\n';
    return out.str();
}

std::string projection_csv(const CarbonProjection& projection) {
    std::ostringstream out;
    out << "n,joules,grams\n";
    for (const auto& p : projection.curve) out << p.predictions << ',' << csv_double(p.joules) << ',' << csv_double(p.grams) << '\n';
    return out.str();
}

nlohmann::json discrepancy_json(const DiscrepancyReport& report) {
    nlohmann::json layers_json = nlohmann::json::array();
    for (const auto& d : report.layers) {
        layers_json.push_back({
            {"index", d.layer_index},
            {"kind", d.kind},
            {"analytic", d.analytic},
            {"counted", d.counted},
            {"difference", d.difference},
            {"expected_offset", d.expected_offset},
            {"muls", d.measured.muls},
            {"adds", d.measured.adds},
            {"comparisons", d.measured.comparisons},
            {"agreement", to_string(d.agreement)},
        });
    }
    return {{"layers", std::move(layers_json)}, {"all_expected", report.all_expected()}};
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace greenprint
