#include "greenprint/errors.hpp"

namespace greenprint {

const char* to_string(GraphErrorKind kind) noexcept {
    switch (kind) {
        case GraphErrorKind::MissingInput: return "MissingInput";
        case GraphErrorKind::MisplacedInput: return "MisplacedInput";
        case GraphErrorKind::DuplicateLabel: return "DuplicateLabel";
        case GraphErrorKind::DanglingSkipReference: return "DanglingSkipReference";
        case GraphErrorKind::PoolWithPadding: return "PoolWithPadding";
        case GraphErrorKind::InvalidField: return "InvalidField";
    }
    return "GraphError";
}

GraphError::GraphError(GraphErrorKind kind, std::size_t layer_index, const std::string& detail)
    : Error((layer_index == npos ? std::string{} : "layer " + std::to_string(layer_index) + ": ") + to_string(kind) + ": " +
            detail),
      kind_(kind),
      layer_index_(layer_index),
      detail_(detail) {}

const char* to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
        case ParseErrorKind::UnknownKeyword: return "UnknownKeyword";
        case ParseErrorKind::BadDimensionPair: return "BadDimensionPair";
        case ParseErrorKind::MissingField: return "MissingField";
        case ParseErrorKind::DuplicateField: return "DuplicateField";
        case ParseErrorKind::BadInteger: return "BadInteger";
        case ParseErrorKind::BadReal: return "BadReal";
        case ParseErrorKind::BadBoolean: return "BadBoolean";
        case ParseErrorKind::BadSyntax: return "BadSyntax";
        case ParseErrorKind::InvalidGraph: return "InvalidGraph";
        case ParseErrorKind::MalformedRow: return "MalformedRow";
    }
    return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message + " (column " + std::to_string(column) + ")"),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

const char* to_string(ShapeErrorKind kind) noexcept {
    switch (kind) {
        case ShapeErrorKind::DegenerateDim: return "DegenerateDim";
        case ShapeErrorKind::DenseOnUnflattenedInput: return "DenseOnUnflattenedInput";
        case ShapeErrorKind::SkipShapeMismatch: return "SkipShapeMismatch";
        case ShapeErrorKind::UnexpandedMacro: return "UnexpandedMacro";
    }
    return "ShapeError";
}

namespace {

std::string shape_message(ShapeErrorKind kind, std::size_t layer_index, const std::string& detail) {
    std::string prefix = layer_index == ShapeError::npos ? std::string{} : "layer " + std::to_string(layer_index) + ": ";
    return prefix + to_string(kind) + ": " + detail;
}

}  // namespace

ShapeError::ShapeError(ShapeErrorKind kind, std::size_t layer_index, const std::string& detail)
    : Error(shape_message(kind, layer_index, detail)), kind_(kind), layer_index_(layer_index), detail_(detail) {}

ShapeError ShapeError::at_layer(std::size_t index) const { return ShapeError(kind_, index, detail_); }

UnknownModel::UnknownModel(const std::string& name) : Error("unknown model '" + name + "'") {}

}  // namespace greenprint
