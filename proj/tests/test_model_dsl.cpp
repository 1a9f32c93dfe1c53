#include <doctest.h>

#include <random>
#include <sstream>

#include "greenprint/errors.hpp"
#include "greenprint/model_dsl.hpp"
#include "oracles.hpp"

using namespace greenprint;

namespace {

ParseError parse_error(std::string_view text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a ParseError for: " << text);
    return ParseError(ParseErrorKind::BadSyntax, 0, 0, "");
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
    return out;
}

}  // namespace

TEST_CASE("minimal program") {
    const auto g = parse_model("model \"tiny\"\ninput 1 1 1\ndense units=3");
    CHECK(g.name == "tiny");
    REQUIRE(g.layers.size() == 2);
    CHECK(std::get<layers::Input>(g.layers[0]).shape == TensorShape{1, 1, 1});
    const auto& d = std::get<layers::Dense>(g.layers[1]);
    CHECK(d.units == 3);
    CHECK_FALSE(d.activation.is_active());
    CHECK(d.bias);
}

TEST_CASE("strided stem convolution") {
    const auto g = parse_model("model \"P\"\ninput 16 924 2\nconv2d filters=32 kernel=1x7 stride=1x3 pad=0x0 activation=relu");
    const auto& c = std::get<layers::Conv2D>(g.layers.at(1));
    CHECK(c.filters == 32);
    CHECK(c.geom == KernelGeometry{1, 7, 1, 3, 0, 0});
    CHECK(c.activation == Activation::relu());
}

TEST_CASE("filters=0 is a bad integer") {
    const auto e = parse_error("input 1 1 1\nconv2d filters=0");
    CHECK(e.kind() == ParseErrorKind::BadInteger);
    CHECK(e.line() == 2);
}

TEST_CASE("serialization of single layers") {
    ModelGraph g;
    g.name = "tiny";
    g.layers.emplace_back(layers::Input{{1, 1, 1}});
    CHECK(serialize_model(g) == "model \"tiny\"\ninput 1 1 1");

    g.layers.emplace_back(layers::Flatten{});
    g.layers.emplace_back(layers::Dense{1000, Activation::leaky_relu(0.001), true});
    CHECK(lines_of(serialize_model(g)).back() == "dense units=1000 activation=leaky_relu alpha=0.001");
}

TEST_CASE("defaults are filled in") {
    const auto g = parse_model("input 8 8 3\nconv2d filters=4 kernel=3x3\nmaxpool kernel=2x2\ndense units=2 activation=leaky_relu");
    CHECK(g.name.empty());
    const auto& c = std::get<layers::Conv2D>(g.layers[1]);
    CHECK(c.geom == KernelGeometry{3, 3, 1, 1, 0, 0});
    CHECK(c.bias);
    const auto& p = std::get<layers::Pool>(g.layers[2]);
    CHECK(p.geom == KernelGeometry{2, 2, 2, 2, 0, 0});
    CHECK(std::get<layers::Dense>(g.layers[3]).activation.alpha == doctest::Approx(0.001));
}

TEST_CASE("comments, blank lines and canonical spacing") {
    const auto g = parse_model("# header\n\nmodel   \"a # b\"  # trailing\ninput 2 2 1   \n\n  flatten\n");
    CHECK(g.name == "a # b");
    CHECK(serialize_model(g) == "model \"a # b\"\ninput 2 2 1\nflatten");
}

TEST_CASE("macros and labels survive serialization") {
    const std::string text =
        "model \"r\"\ninput 8 8 16\nlabel skip\nresblock filters=16\nresblock filters=32 downsample=true\n"
        "conv2d filters=32 kernel=1x1 stride=1x1 pad=0x0 on=skip\nbatchnorm on=skip\naddfrom skip\n"
        "activation kind=relu\nglobalavgpool\navgpool kernel=2x2 stride=1x1";
    CHECK(serialize_model(parse_model(text)) == text);
}

TEST_CASE("error kinds and positions") {
    CHECK(parse_error("model \"x\"\ninput 8 8 1\nconvolve filters=2").kind() == ParseErrorKind::UnknownKeyword);
    CHECK(parse_error("model \"x\"\ninput 8 8 1\nconvolve filters=2").line() == 3);
    CHECK(std::string(parse_error("model \"x\"\ninput 8 8 1\nconvolve").what()).rfind("line 3: unknown keyword", 0) == 0);
    CHECK(parse_error("input 8 8 1\nconv2d filters=2 kernel=3by3").kind() == ParseErrorKind::BadDimensionPair);
    CHECK(parse_error("input 8 8 1\nconv2d kernel=3x3").kind() == ParseErrorKind::MissingField);
    CHECK(parse_error("input 8 8 1\nflatten\ndense units=2 units=3").kind() == ParseErrorKind::DuplicateField);
    CHECK(parse_error("input 8 8 1\nflatten\ndense units=2 activation=leaky_relu alpha=fast").kind() == ParseErrorKind::BadReal);
    CHECK(parse_error("input 8 8 1\nresblock filters=2 downsample=maybe").kind() == ParseErrorKind::BadBoolean);
    CHECK(parse_error("input 8 8 1\nflatten\ndense units=-2").kind() == ParseErrorKind::BadInteger);
    CHECK(parse_error("input 8 8 1\naddfrom nowhere").kind() == ParseErrorKind::InvalidGraph);
    CHECK(parse_error("input 8 8 1\naddfrom nowhere").line() == 2);
    CHECK(parse_error("input 8 8 1\nmaxpool kernel=2x2 pad=1x1").line() == 2);
    CHECK(parse_error("conv2d filters=1 kernel=1x1").kind() == ParseErrorKind::InvalidGraph);
    CHECK(parse_error("").kind() == ParseErrorKind::InvalidGraph);
}

TEST_CASE("round trip and canonical form on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = testing::random_dsl_graph(rng);
        const auto text = serialize_model(g);
        const auto parsed = parse_model(text);
        CHECK(parsed == g);
        CHECK(serialize_model(parsed) == text);
    }
}

TEST_CASE("a single injected bad token is reported on its own line") {
    std::mt19937_64 rng(13);
    static const char* const junk[] = {"zzz=1", "filters=abc", "x", "kernel=3x", "=", "units=1e3"};
    for (int trial = 0; trial < 300; ++trial) {
        auto lines = lines_of(serialize_model(testing::random_dsl_graph(rng)));
        const auto target = std::uniform_int_distribution<std::size_t>(0, lines.size() - 1)(rng);
        const auto* token = junk[std::uniform_int_distribution<int>(0, 5)(rng)];
        lines[target] += std::string(" ") + token;
        const auto e = parse_error(join(lines));
        CHECK_MESSAGE(e.line() == target + 1, lines[target]);
    }
}
