#include "greenprint/model_dsl.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "greenprint/errors.hpp"

namespace greenprint {

namespace {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

struct Field {
    std::string_view value;
    std::size_t column;      // column of the key
    std::size_t value_column;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class LineParser {
public:
    LineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(ParseErrorKind kind, std::size_t column, const std::string& message) const {
        throw ParseError(kind, line_no_, column, message);
    }

    // Strips an unquoted '#' comment and returns whitespace-separated tokens.
    std::vector<Token> tokenize() {
        bool in_quotes = false;
        std::size_t end = line_.size();
        for (std::size_t i = 0; i < line_.size(); ++i) {
            char c = line_[i];
            if (in_quotes && c == '\\') {
                ++i;
            } else if (c == '"') {
                in_quotes = !in_quotes;
            } else if (c == '#' && !in_quotes) {
                end = i;
                break;
            }
        }
        content_ = line_.substr(0, end);

        std::vector<Token> tokens;
        std::size_t i = 0;
        while (i < content_.size()) {
            while (i < content_.size() && is_space(content_[i])) ++i;
            if (i >= content_.size()) break;
            std::size_t start = i;
            while (i < content_.size() && !is_space(content_[i])) ++i;
            tokens.push_back({content_.substr(start, i - start), start + 1});
        }
        return tokens;
    }

    // `model "name"`: the remainder after the keyword is one quoted string.
    std::string parse_model_name(const Token& keyword) const {
        std::size_t i = keyword.column - 1 + keyword.text.size();
        while (i < content_.size() && is_space(content_[i])) ++i;
        if (i >= content_.size() || content_[i] != '"') {
            fail(ParseErrorKind::MissingField, i + 1, "expected quoted model name");
        }
        const std::size_t open = i;
        std::string name;
        for (++i; i < content_.size(); ++i) {
            char c = content_[i];
            if (c == '\\') {
                if (i + 1 >= content_.size() || (content_[i + 1] != '"' && content_[i + 1] != '\\')) {
                    fail(ParseErrorKind::BadSyntax, i + 1, "invalid escape in model name");
                }
                name.push_back(content_[++i]);
            } else if (c == '"') {
                std::size_t rest = i + 1;
                while (rest < content_.size() && is_space(content_[rest])) ++rest;
                if (rest < content_.size()) fail(ParseErrorKind::BadSyntax, rest + 1, "unexpected text after model name");
                return name;
            } else {
                name.push_back(c);
            }
        }
        fail(ParseErrorKind::BadSyntax, open + 1, "unterminated model name");
    }

    std::int64_t parse_integer(std::string_view text, std::size_t column, std::int64_t min_value,
                               std::string_view what) const {
        std::int64_t value = 0;
        bool digits_only = !text.empty();
        for (char c : text) digits_only = digits_only && is_digit(c);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (!digits_only || ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(ParseErrorKind::BadInteger, column, std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
        }
        if (value < min_value) {
            fail(ParseErrorKind::BadInteger, column,
                 std::string(what) + " must be >= " + std::to_string(min_value) + ", got " + std::string(text));
        }
        return value;
    }

    std::array<std::int64_t, 2> parse_pair(std::string_view text, std::size_t column, std::int64_t min_value,
                                           std::string_view what) const {
        const auto x = text.find('x');
        std::array<std::int64_t, 2> out{};
        auto bad = [&](const std::string& why) {
            fail(ParseErrorKind::BadDimensionPair, column, std::string(what) + ": " + why);
        };
        if (x == std::string_view::npos) bad("expected RxC, got '" + std::string(text) + "'");
        const std::array<std::string_view, 2> parts{text.substr(0, x), text.substr(x + 1)};
        for (std::size_t k = 0; k < 2; ++k) {
            const auto part = parts[k];
            bool digits_only = !part.empty();
            for (char c : part) digits_only = digits_only && is_digit(c);
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out[k]);
            if (!digits_only || ec != std::errc{} || ptr != part.data() + part.size()) {
                bad("expected RxC, got '" + std::string(text) + "'");
            }
            if (out[k] < min_value) bad("components must be >= " + std::to_string(min_value));
        }
        return out;
    }

    double parse_real(std::string_view text, std::size_t column, std::string_view what) const {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::general);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
            fail(ParseErrorKind::BadReal, column, std::string(what) + ": '" + std::string(text) + "' is not a real number");
        }
        return value;
    }

    bool parse_bool(std::string_view text, std::size_t column, std::string_view what) const {
        if (text == "true") return true;
        if (text == "false") return false;
        fail(ParseErrorKind::BadBoolean, column, std::string(what) + ": expected true or false");
    }

    std::string parse_identifier(std::string_view text, std::size_t column) const {
        bool ok = !text.empty() && !is_digit(text.front());
        for (char c : text) ok = ok && (is_digit(c) || c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'));
        if (!ok) fail(ParseErrorKind::BadSyntax, column, "'" + std::string(text) + "' is not an identifier");
        return std::string(text);
    }

    // key=value arguments following the keyword.
    std::map<std::string_view, Field> parse_fields(const std::vector<Token>& tokens,
                                                   std::initializer_list<std::string_view> allowed) const {
        std::map<std::string_view, Field> fields;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            const auto eq = tok.text.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                fail(ParseErrorKind::BadSyntax, tok.column, "expected key=value, got '" + std::string(tok.text) + "'");
            }
            const auto key = tok.text.substr(0, eq);
            bool known = false;
            for (auto a : allowed) known = known || a == key;
            if (!known) {
                fail(ParseErrorKind::UnknownKeyword, tok.column,
                     "unknown field '" + std::string(key) + "' for " + std::string(tokens.front().text));
            }
            if (fields.contains(key)) {
                fail(ParseErrorKind::DuplicateField, tok.column, "duplicate field '" + std::string(key) + "'");
            }
            fields.emplace(key, Field{tok.text.substr(eq + 1), tok.column, tok.column + eq + 1});
        }
        return fields;
    }

    const Field& required(const std::map<std::string_view, Field>& fields, std::string_view key,
                          const Token& keyword) const {
        auto it = fields.find(key);
        if (it == fields.end()) {
            fail(ParseErrorKind::MissingField, keyword.column,
                 std::string(keyword.text) + " requires field '" + std::string(key) + "'");
        }
        return it->second;
    }

    Activation parse_activation(const std::map<std::string_view, Field>& fields, std::string_view key) const {
        Activation act;
        auto it = fields.find(key);
        if (it != fields.end()) {
            const auto v = it->second.value;
            if (v == "none") {
                act = Activation::none();
            } else if (v == "relu") {
                act = Activation::relu();
            } else if (v == "leaky_relu") {
                act = Activation::leaky_relu();
            } else {
                fail(ParseErrorKind::UnknownKeyword, it->second.value_column, "unknown activation '" + std::string(v) + "'");
            }
        }
        if (auto a = fields.find("alpha"); a != fields.end()) {
            if (act.kind != ActivationKind::leaky_relu) {
                fail(ParseErrorKind::BadReal, a->second.column, "alpha is only valid with leaky_relu");
            }
            act.alpha = parse_real(a->second.value, a->second.value_column, "alpha");
            if (act.alpha < 0.0) fail(ParseErrorKind::BadReal, a->second.value_column, "alpha must be >= 0");
        }
        return act;
    }

    void expect_no_arguments(const std::vector<Token>& tokens) const {
        if (tokens.size() > 1) {
            fail(ParseErrorKind::BadSyntax, tokens[1].column,
                 std::string(tokens.front().text) + " takes no arguments");
        }
    }

    LayerSpec parse_layer(const std::vector<Token>& tokens) const {
        const Token& kw = tokens.front();
        const auto k = kw.text;

        if (k == "input") {
            if (tokens.size() < 4) {
                fail(ParseErrorKind::MissingField, kw.column, "input requires three dimensions: R C CH");
            }
            if (tokens.size() > 4) fail(ParseErrorKind::BadSyntax, tokens[4].column, "input takes three dimensions");
            layers::Input in;
            in.shape.rows = parse_integer(tokens[1].text, tokens[1].column, 1, "rows");
            in.shape.cols = parse_integer(tokens[2].text, tokens[2].column, 1, "cols");
            in.shape.channels = parse_integer(tokens[3].text, tokens[3].column, 1, "channels");
            return in;
        }
        if (k == "conv2d") {
            auto f = parse_fields(tokens, {"filters", "kernel", "stride", "pad", "activation", "alpha", "bias", "on"});
            layers::Conv2D conv;
            const auto& filters = required(f, "filters", kw);
            conv.filters = parse_integer(filters.value, filters.value_column, 1, "filters");
            const auto& kernel = required(f, "kernel", kw);
            const auto kk = parse_pair(kernel.value, kernel.value_column, 1, "kernel");
            conv.geom.k_rows = kk[0];
            conv.geom.k_cols = kk[1];
            if (auto it = f.find("stride"); it != f.end()) {
                const auto s = parse_pair(it->second.value, it->second.value_column, 1, "stride");
                conv.geom.s_rows = s[0];
                conv.geom.s_cols = s[1];
            }
            if (auto it = f.find("pad"); it != f.end()) {
                const auto p = parse_pair(it->second.value, it->second.value_column, 0, "pad");
                conv.geom.p_rows = p[0];
                conv.geom.p_cols = p[1];
            }
            conv.activation = parse_activation(f, "activation");
            if (auto it = f.find("bias"); it != f.end()) conv.bias = parse_bool(it->second.value, it->second.value_column, "bias");
            if (auto it = f.find("on"); it != f.end()) conv.branch = parse_identifier(it->second.value, it->second.value_column);
            return conv;
        }
        if (k == "maxpool" || k == "avgpool") {
            auto f = parse_fields(tokens, {"kernel", "stride", "pad"});
            layers::Pool pool;
            pool.kind = k == "maxpool" ? layers::PoolKind::max : layers::PoolKind::avg;
            const auto& kernel = required(f, "kernel", kw);
            const auto kk = parse_pair(kernel.value, kernel.value_column, 1, "kernel");
            pool.geom.k_rows = pool.geom.s_rows = kk[0];
            pool.geom.k_cols = pool.geom.s_cols = kk[1];
            if (auto it = f.find("stride"); it != f.end()) {
                const auto s = parse_pair(it->second.value, it->second.value_column, 1, "stride");
                pool.geom.s_rows = s[0];
                pool.geom.s_cols = s[1];
            }
            // Accepted so that validation can report PoolWithPadding at this line.
            if (auto it = f.find("pad"); it != f.end()) {
                const auto p = parse_pair(it->second.value, it->second.value_column, 0, "pad");
                pool.geom.p_rows = p[0];
                pool.geom.p_cols = p[1];
            }
            return pool;
        }
        if (k == "batchnorm") {
            auto f = parse_fields(tokens, {"on"});
            layers::BatchNorm bn;
            if (auto it = f.find("on"); it != f.end()) bn.branch = parse_identifier(it->second.value, it->second.value_column);
            return bn;
        }
        if (k == "flatten") {
            expect_no_arguments(tokens);
            return layers::Flatten{};
        }
        if (k == "globalavgpool") {
            expect_no_arguments(tokens);
            return layers::GlobalAvgPool{};
        }
        if (k == "dense") {
            auto f = parse_fields(tokens, {"units", "activation", "alpha", "bias"});
            layers::Dense dense;
            const auto& units = required(f, "units", kw);
            dense.units = parse_integer(units.value, units.value_column, 1, "units");
            dense.activation = parse_activation(f, "activation");
            if (auto it = f.find("bias"); it != f.end()) dense.bias = parse_bool(it->second.value, it->second.value_column, "bias");
            return dense;
        }
        if (k == "activation") {
            auto f = parse_fields(tokens, {"kind", "alpha"});
            required(f, "kind", kw);
            return layers::ActivationOnly{parse_activation(f, "kind")};
        }
        if (k == "label" || k == "addfrom") {
            if (tokens.size() < 2) fail(ParseErrorKind::MissingField, kw.column, std::string(k) + " requires an identifier");
            if (tokens.size() > 2) fail(ParseErrorKind::BadSyntax, tokens[2].column, std::string(k) + " takes one identifier");
            auto id = parse_identifier(tokens[1].text, tokens[1].column);
            if (k == "label") return layers::LabelPoint{std::move(id)};
            return layers::AddFrom{std::move(id)};
        }
        if (k == "resblock") {
            auto f = parse_fields(tokens, {"filters", "downsample"});
            layers::ResBlock block;
            const auto& filters = required(f, "filters", kw);
            block.filters = parse_integer(filters.value, filters.value_column, 1, "filters");
            if (auto it = f.find("downsample"); it != f.end()) {
                block.downsample = parse_bool(it->second.value, it->second.value_column, "downsample");
            }
            return block;
        }
        fail(ParseErrorKind::UnknownKeyword, kw.column, "unknown keyword '" + std::string(k) + "'");
    }

private:
    std::string_view line_;
    std::string_view content_;
    std::size_t line_no_;
};

std::string format_real(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string pair(std::int64_t a, std::int64_t b) { return std::to_string(a) + "x" + std::to_string(b); }

void append_activation(std::string& out, const Activation& act, std::string_view key) {
    if (!act.is_active()) return;
    out += ' ';
    out += key;
    out += '=';
    out += to_string(act.kind);
    if (act.kind == ActivationKind::leaky_relu) out += " alpha=" + format_real(act.alpha);
}

std::string quote(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string serialize_layer(const LayerSpec& layer) {
    return std::visit(
        overloaded{
            [](const layers::Input& in) {
                return "input " + std::to_string(in.shape.rows) + " " + std::to_string(in.shape.cols) + " " +
                       std::to_string(in.shape.channels);
            },
            [](const layers::Conv2D& c) {
                std::string s = "conv2d filters=" + std::to_string(c.filters) + " kernel=" + pair(c.geom.k_rows, c.geom.k_cols) +
                                " stride=" + pair(c.geom.s_rows, c.geom.s_cols) + " pad=" + pair(c.geom.p_rows, c.geom.p_cols);
                append_activation(s, c.activation, "activation");
                if (!c.bias) s += " bias=false";
                if (!c.branch.empty()) s += " on=" + c.branch;
                return s;
            },
            [](const layers::Pool& p) {
                std::string s = p.kind == layers::PoolKind::max ? "maxpool" : "avgpool";
                s += " kernel=" + pair(p.geom.k_rows, p.geom.k_cols) + " stride=" + pair(p.geom.s_rows, p.geom.s_cols);
                if (p.geom.has_padding()) s += " pad=" + pair(p.geom.p_rows, p.geom.p_cols);
                return s;
            },
            [](const layers::Dense& d) {
                std::string s = "dense units=" + std::to_string(d.units);
                append_activation(s, d.activation, "activation");
                if (!d.bias) s += " bias=false";
                return s;
            },
            [](const layers::BatchNorm& bn) {
                return bn.branch.empty() ? std::string("batchnorm") : "batchnorm on=" + bn.branch;
            },
            [](const layers::Flatten&) { return std::string("flatten"); },
            [](const layers::GlobalAvgPool&) { return std::string("globalavgpool"); },
            [](const layers::AddFrom& a) { return "addfrom " + a.label; },
            [](const layers::LabelPoint& l) { return "label " + l.label; },
            [](const layers::ActivationOnly& a) {
                std::string s = "activation";
                append_activation(s, a.activation, "kind");
                return s;
            },
            [](const layers::ResBlock& b) {
                std::string s = "resblock filters=" + std::to_string(b.filters);
                if (b.downsample) s += " downsample=true";
                return s;
            },
        },
        layer);
}

}  // namespace

ModelGraph parse_model(std::string_view text) {
    ModelGraph graph;
    std::vector<std::size_t> layer_lines;
    bool seen_model = false;
    std::size_t line_no = 0;
    std::size_t last_line = 1;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        LineParser parser(line, line_no);
        const auto tokens = parser.tokenize();
        if (tokens.empty()) continue;
        last_line = line_no;

        if (tokens.front().text == "model") {
            if (seen_model || !graph.layers.empty()) {
                parser.fail(ParseErrorKind::BadSyntax, tokens.front().column,
                            "model declaration must be the first statement and appear once");
            }
            graph.name = parser.parse_model_name(tokens.front());
            seen_model = true;
            continue;
        }
        graph.layers.push_back(parser.parse_layer(tokens));
        layer_lines.push_back(line_no);
    }

    try {
        return validate_graph(std::move(graph));
    } catch (const GraphError& e) {
        const std::size_t line = e.layer_index() < layer_lines.size() ? layer_lines[e.layer_index()] : last_line;
        throw ParseError(ParseErrorKind::InvalidGraph, line, 1, std::string(to_string(e.kind())) + ": " + e.detail());
    }
}

std::string serialize_model(const ModelGraph& graph) {
    std::string out = "model " + quote(graph.name);
    for (const auto& layer : graph.layers) {
        out += '\n';
        out += serialize_layer(layer);
    }
    return out;
}

}  // namespace greenprint
