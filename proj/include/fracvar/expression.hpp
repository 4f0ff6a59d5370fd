#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fracvar {

/// Syntax error in an expression; position is a 0-based character offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const noexcept { return position_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t position_;
};

/// Raised when an expression leaves its domain (ln of a non-positive number,
/// division by zero, ...). Evaluation never returns NaN or infinity.
class EvaluationError : public std::domain_error {
public:
    explicit EvaluationError(const std::string& what) : std::domain_error(what) {}
};

enum class Var { t, x, d, x1, x2, d1, d2, d3 };
inline constexpr std::size_t var_count = 8;

std::string_view var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

/// Values for every variable; unused ones may stay zero.
using Environment = std::array<double, var_count>;

enum class Func { sin, cos, exp, ln, sqrt, abs, gammafn };
enum class BinaryOp { add, sub, mul, div, pow };

/**
 * Arithmetic expression over t, x, d (and x1, x2, d1, d2, d3) with
 * + - * / ^, unary minus, sin cos exp ln sqrt abs gammafn and pi.
 *
 * Immutable value type; nodes live in a flat array.
 */
class Expression {
public:
    static Expression number(double v);
    static Expression variable(Var v);
    static Expression negate(const Expression& e);
    static Expression binary(BinaryOp op, const Expression& lhs, const Expression& rhs);
    static Expression call(Func f, const Expression& arg);

    double evaluate(const Environment& env) const;

    /// Fully parenthesised text that parses back to an equivalent tree.
    std::string to_string() const;

    /// Variables referenced anywhere in the tree, without duplicates.
    std::vector<Var> variables() const;

private:
    Expression() = default;

    enum class Kind { number, variable, negate, binary, call };
    struct Node {
        Kind kind;
        double value = 0.0;
        Var var = Var::t;
        BinaryOp op = BinaryOp::add;
        Func func = Func::sin;
        std::size_t lhs = 0;
        std::size_t rhs = 0;
    };

    std::size_t append(const Expression& other);
    double eval_node(std::size_t i, const Environment& env) const;
    void print_node(std::size_t i, std::string& out) const;

    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

/**
 * Recursive-descent parser. Precedence from tightest: ^ (right-assoc),
 * unary minus, * /, + - (left-assoc). Throws ParseError on bad syntax,
 * unknown identifiers and wrong argument counts.
 */
Expression parse(std::string_view source);

} // namespace fracvar
