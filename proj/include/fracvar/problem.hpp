#pragma once

#include "fracvar/expression.hpp"
#include "fracvar/grid.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fracvar {

/**
 * Integrand L(t, ...) evaluated on a flat argument list. Slot numbering
 * follows the usual partial-derivative convention: slot 1 is t, so for a
 * scalar problem (t, x, d) the partials are ∂₂L (in x) and ∂₃L (in d).
 *
 * Either wraps an Expression whose variables are bound to slots, or an
 * arbitrary callable.
 */
class Lagrangian {
public:
    using Function = std::function<double(std::span<const double>)>;

    /// Binds `expr` to the slot variables `slots` (slots[0] is t by convention).
    /// Throws std::invalid_argument if expr uses a variable not listed.
    Lagrangian(Expression expr, std::vector<Var> slots);
    Lagrangian(Function f, std::size_t arity, std::string description);

    /// L(t, x, d)
    static Lagrangian scalar(Expression expr);
    /// L(t, x1, x2, d1, d2)
    static Lagrangian two_component(Expression expr);
    /// L(t, x, d1, ..., dm); m = 1 is the scalar layout.
    static Lagrangian higher_order(Expression expr, int m);
    /// g(t, x1, x2)
    static Lagrangian holonomic(Expression expr);

    double operator()(std::span<const double> args) const;
    double operator()(std::initializer_list<double> args) const
    {
        return (*this)(std::span<const double>(args.begin(), args.size()));
    }

    std::size_t arity() const noexcept { return arity_; }
    const std::string& description() const noexcept { return description_; }

    /// c * L
    Lagrangian scaled(double c) const;
    /// L + c * other, same layout.
    Lagrangian plus(double c, const Lagrangian& other) const;

private:
    Function fn_;
    std::size_t arity_;
    std::string description_;
};

/**
 * First partial derivative in slot `which` (1-based, 2..arity) by central
 * differences with step cbrt(eps) * max(1, |coordinate|).
 */
double partial(const Lagrangian& L, std::size_t which, std::span<const double> args);
double partial(const Lagrangian& L, std::size_t which, std::initializer_list<double> args);

/// Second partial in slot `which`, step eps^(1/4) * max(1, |coordinate|).
double second_partial(const Lagrangian& L, std::size_t which, std::span<const double> args);

/// Endpoint conditions for one component; nullopt marks a free endpoint.
struct BoundaryCondition {
    std::optional<double> left;
    std::optional<double> right;
};

/// Integral constraint ∫ M(t, x, d) dt = level.
struct IsoperimetricConstraint {
    Lagrangian integrand;
    double level;
};

/// Pointwise constraint g(t, x1, x2) = 0.
struct HolonomicConstraint {
    Lagrangian g;
};

enum class Layout { scalar, two_component, higher_order };

using Constraint = std::variant<std::monostate, IsoperimetricConstraint, HolonomicConstraint>;

struct VariationalProblem {
    std::string name;
    double a;
    double b;
    Layout layout;
    /// One order per component (scalar, two_component) or one per derivative
    /// slot (higher_order).
    std::vector<FracOrder> orders;
    Lagrangian lagrangian;
    std::vector<BoundaryCondition> boundary;
    Constraint constraint;
    /// Known minimiser, if any, as an expression in t.
    std::optional<Expression> exact_solution;

    std::size_t components() const noexcept { return layout == Layout::two_component ? 2 : 1; }
    bool is_isoperimetric() const { return std::holds_alternative<IsoperimetricConstraint>(constraint); }
    bool is_holonomic() const { return std::holds_alternative<HolonomicConstraint>(constraint); }

    /// Throws std::invalid_argument describing the first inconsistency.
    void validate() const;
};

class UnknownProblemError : public std::invalid_argument {
public:
    explicit UnknownProblemError(const std::string& what) : std::invalid_argument(what) {}
};

/**
 * Built-in problems:
 *   example1  ∫₀¹⁰ (D^α x − Γ(3)/Γ(3−α) t^(2−α))² dt, x(0)=0, x(10)=100, α = 0.5,
 *             minimiser t²
 *   example2  ∫₀¹ (x (D^α x)² − sin x)² dt, x(0)=0, x(1)=1, α = 0.5
 * The order may be overridden with a suffix, e.g. "example1:alpha=0.8".
 */
VariationalProblem builtin(std::string_view name);

/// True when `name` (without any suffix) names a built-in problem.
bool is_builtin(std::string_view name);

} // namespace fracvar
