#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace greenprint {

// Exit codes of the command-line tool. Each error family below maps onto one.
enum class ExitCode : int {
    ok = 0,
    parse = 1,
    shape = 2,
    parameter = 3,
    desk_scale = 4,
    verification = 5,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept = 0;
};

enum class GraphErrorKind {
    MissingInput,
    MisplacedInput,
    DuplicateLabel,
    DanglingSkipReference,
    PoolWithPadding,
    InvalidField,
};

const char* to_string(GraphErrorKind kind) noexcept;

// Structural violation of a model graph, anchored to a layer index.
class GraphError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    GraphError(GraphErrorKind kind, std::size_t layer_index, const std::string& detail);

    GraphErrorKind kind() const noexcept { return kind_; }
    std::size_t layer_index() const noexcept { return layer_index_; }
    const std::string& detail() const noexcept { return detail_; }
    ExitCode exit_code() const noexcept override { return ExitCode::shape; }

private:
    GraphErrorKind kind_;
    std::size_t layer_index_;
    std::string detail_;
};

enum class ParseErrorKind {
    UnknownKeyword,
    BadDimensionPair,
    MissingField,
    DuplicateField,
    BadInteger,
    BadReal,
    BadBoolean,
    BadSyntax,
    InvalidGraph,
    MalformedRow,
};

const char* to_string(ParseErrorKind kind) noexcept;

// Error raised by the model-description parser. line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message);

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }
    ExitCode exit_code() const noexcept override { return ExitCode::parse; }

private:
    ParseErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

enum class ShapeErrorKind {
    DegenerateDim,
    DenseOnUnflattenedInput,
    SkipShapeMismatch,
    UnexpandedMacro,
};

const char* to_string(ShapeErrorKind kind) noexcept;

class ShapeError : public Error {
public:
    // layer_index is npos for errors raised outside of graph traversal.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    ShapeError(ShapeErrorKind kind, std::size_t layer_index, const std::string& detail);

    ShapeErrorKind kind() const noexcept { return kind_; }
    std::size_t layer_index() const noexcept { return layer_index_; }
    ShapeError at_layer(std::size_t index) const;
    ExitCode exit_code() const noexcept override { return ExitCode::shape; }

private:
    ShapeErrorKind kind_;
    std::size_t layer_index_;
    std::string detail_;
};

// Non-positive or otherwise out-of-domain numeric parameter.
class ParameterError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::parameter; }
};

class UnknownModel : public Error {
public:
    explicit UnknownModel(const std::string& name);
    ExitCode exit_code() const noexcept override { return ExitCode::parameter; }
};

class DeskScaleExceeded : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::desk_scale; }
};

class ExecutorShapeMismatch : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::shape; }
};

}  // namespace greenprint
