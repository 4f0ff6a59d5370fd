#include "fracvar/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fracvar {

namespace {

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Probe pair around `value`; returns the actually representable spacing.
struct Probe {
    double lo;
    double hi;
};

Probe probe(double value, double relative_step)
{
    const double s = relative_step * std::max(1.0, std::abs(value));
    return {value - s, value + s};
}

} // namespace

Lagrangian::Lagrangian(Expression expr, std::vector<Var> slots)
    : arity_(slots.size()), description_(expr.to_string())
{
    for (Var v : expr.variables()) {
        if (std::find(slots.begin(), slots.end(), v) == slots.end())
            throw std::invalid_argument("unknown identifier '" + std::string(var_name(v)) +
                                        "' for this problem layout");
    }
    fn_ = [expr = std::move(expr), slots = std::move(slots)](std::span<const double> args) {
        Environment env{};
        for (std::size_t i = 0; i < slots.size(); ++i)
            env[static_cast<std::size_t>(slots[i])] = args[i];
        return expr.evaluate(env);
    };
}

Lagrangian::Lagrangian(Function f, std::size_t arity, std::string description)
    : fn_(std::move(f)), arity_(arity), description_(std::move(description))
{
}

Lagrangian Lagrangian::scalar(Expression expr)
{
    return Lagrangian(std::move(expr), {Var::t, Var::x, Var::d});
}

Lagrangian Lagrangian::two_component(Expression expr)
{
    return Lagrangian(std::move(expr), {Var::t, Var::x1, Var::x2, Var::d1, Var::d2});
}

Lagrangian Lagrangian::higher_order(Expression expr, int m)
{
    if (m == 1)
        return scalar(std::move(expr));
    if (m < 1 || m > 3)
        throw std::invalid_argument("higher-order Lagrangian supports 1 to 3 derivative slots");
    std::vector<Var> slots{Var::t, Var::x, Var::d1, Var::d2};
    if (m == 3)
        slots.push_back(Var::d3);
    return Lagrangian(std::move(expr), std::move(slots));
}

Lagrangian Lagrangian::holonomic(Expression expr)
{
    return Lagrangian(std::move(expr), {Var::t, Var::x1, Var::x2});
}

double Lagrangian::operator()(std::span<const double> args) const
{
    if (args.size() != arity_)
        throw std::invalid_argument("Lagrangian expects " + std::to_string(arity_) +
                                    " arguments, got " + std::to_string(args.size()));
    return fn_(args);
}

Lagrangian Lagrangian::scaled(double c) const
{
    return Lagrangian([fn = fn_, c](std::span<const double> a) { return c * fn(a); }, arity_,
                      format_real(c) + "*(" + description_ + ")");
}

Lagrangian Lagrangian::plus(double c, const Lagrangian& other) const
{
    if (other.arity_ != arity_)
        throw std::invalid_argument("cannot combine Lagrangians of different arity");
    return Lagrangian(
        [f = fn_, g = other.fn_, c](std::span<const double> a) { return f(a) + c * g(a); },
        arity_, "(" + description_ + ")+" + format_real(c) + "*(" + other.description_ + ")");
}

double partial(const Lagrangian& L, std::size_t which, std::span<const double> args)
{
    if (which < 2 || which > args.size())
        throw std::invalid_argument("partial: slot " + std::to_string(which) + " out of range");
    const std::size_t i = which - 1;
    const Probe p = probe(args[i], std::cbrt(std::numeric_limits<double>::epsilon()));
    std::vector<double> work(args.begin(), args.end());
    work[i] = p.hi;
    const double up = L(work);
    work[i] = p.lo;
    const double down = L(work);
    const double d = (up - down) / (p.hi - p.lo);
    if (!std::isfinite(d))
        throw EvaluationError("partial: non-finite difference quotient");
    return d;
}

double partial(const Lagrangian& L, std::size_t which, std::initializer_list<double> args)
{
    return partial(L, which, std::span<const double>(args.begin(), args.size()));
}

double second_partial(const Lagrangian& L, std::size_t which, std::span<const double> args)
{
    if (which < 2 || which > args.size())
        throw std::invalid_argument("second_partial: slot " + std::to_string(which) +
                                    " out of range");
    const std::size_t i = which - 1;
    const double x = args[i];
    const Probe p = probe(x, std::pow(std::numeric_limits<double>::epsilon(), 0.25));
    const double s = 0.5 * (p.hi - p.lo);
    std::vector<double> work(args.begin(), args.end());
    const double mid = L(work);
    work[i] = p.hi;
    const double up = L(work);
    work[i] = p.lo;
    const double down = L(work);
    const double d = (up - 2.0 * mid + down) / (s * s);
    if (!std::isfinite(d))
        throw EvaluationError("second_partial: non-finite difference quotient");
    return d;
}

void VariationalProblem::validate() const
{
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw std::invalid_argument("problem: need finite a < b");
    const std::size_t m = components();
    if (boundary.size() != m)
        throw std::invalid_argument("problem: expected " + std::to_string(m) +
                                    " boundary conditions, got " +
                                    std::to_string(boundary.size()));
    for (const auto& bc : boundary) {
        if ((bc.left && !std::isfinite(*bc.left)) || (bc.right && !std::isfinite(*bc.right)))
            throw std::invalid_argument("problem: boundary values must be finite");
    }
    switch (layout) {
    case Layout::scalar:
        if (orders.size() != 1 || orders[0].value() > 1.0)
            throw std::invalid_argument("problem: scalar problems take one order in (0, 1]");
        if (lagrangian.arity() != 3)
            throw std::invalid_argument("problem: scalar Lagrangian must be L(t, x, d)");
        break;
    case Layout::two_component:
        if (orders.size() != 2 || orders[0].value() >= 1.0 || orders[1].value() >= 1.0)
            throw std::invalid_argument("problem: two-component problems take orders in (0, 1)");
        if (lagrangian.arity() != 5)
            throw std::invalid_argument("problem: Lagrangian must be L(t, x1, x2, d1, d2)");
        break;
    case Layout::higher_order:
        if (orders.empty() || orders.size() > 3)
            throw std::invalid_argument("problem: higher-order problems take 1 to 3 orders");
        for (std::size_t i = 0; i < orders.size(); ++i) {
            const double lo = static_cast<double>(i);
            if (!(orders[i].value() > lo && orders[i].value() < lo + 1.0))
                throw std::invalid_argument("problem: order " + std::to_string(i + 1) +
                                            " must lie in (" + std::to_string(i) + ", " +
                                            std::to_string(i + 1) + ")");
        }
        if (lagrangian.arity() != orders.size() + 2)
            throw std::invalid_argument("problem: Lagrangian arity does not match the orders");
        break;
    }
    if (const auto* iso = std::get_if<IsoperimetricConstraint>(&constraint)) {
        if (layout != Layout::scalar)
            throw std::invalid_argument("problem: isoperimetric constraints need a scalar problem");
        if (iso->integrand.arity() != lagrangian.arity() || !std::isfinite(iso->level))
            throw std::invalid_argument("problem: malformed isoperimetric constraint");
    }
    if (const auto* hol = std::get_if<HolonomicConstraint>(&constraint)) {
        if (layout != Layout::two_component)
            throw std::invalid_argument("problem: holonomic constraints need two components");
        if (hol->g.arity() != 3)
            throw std::invalid_argument("problem: holonomic g must be g(t, x1, x2)");
    }
}

namespace {

VariationalProblem example1(double alpha)
{
    // Caputo derivative of t^2 is Γ(3)/Γ(3-α) t^(2-α)
    const std::string src = "(d - 2/gammafn(" + format_real(3.0 - alpha) + ")*t^" +
                            format_real(2.0 - alpha) + ")^2";
    return VariationalProblem{
        .name = "example1",
        .a = 0.0,
        .b = 10.0,
        .layout = Layout::scalar,
        .orders = {FracOrder(alpha)},
        .lagrangian = Lagrangian::scalar(parse(src)),
        .boundary = {BoundaryCondition{0.0, 100.0}},
        .constraint = {},
        .exact_solution = parse("t^2"),
    };
}

VariationalProblem example2(double alpha)
{
    return VariationalProblem{
        .name = "example2",
        .a = 0.0,
        .b = 1.0,
        .layout = Layout::scalar,
        .orders = {FracOrder(alpha)},
        .lagrangian = Lagrangian::scalar(parse("(x*d^2 - sin(x))^2")),
        .boundary = {BoundaryCondition{0.0, 1.0}},
        .constraint = {},
        .exact_solution = std::nullopt,
    };
}

std::string_view base_name(std::string_view name)
{
    return name.substr(0, name.find(':'));
}

} // namespace

bool is_builtin(std::string_view name)
{
    const auto base = base_name(name);
    return base == "example1" || base == "example2";
}

VariationalProblem builtin(std::string_view name)
{
    const auto base = base_name(name);
    double alpha = 0.5;
    if (base.size() != name.size()) {
        const std::string_view suffix = name.substr(base.size() + 1);
        constexpr std::string_view key = "alpha=";
        if (suffix.substr(0, key.size()) != key)
            throw UnknownProblemError("unknown built-in option '" + std::string(suffix) + "'");
        const std::string_view num = suffix.substr(key.size());
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), alpha);
        if (ec != std::errc() || ptr != num.data() + num.size() || !(alpha > 0.0 && alpha < 1.0))
            throw UnknownProblemError("built-in order must be a number in (0, 1), got '" +
                                      std::string(num) + "'");
    }
    if (base == "example1")
        return example1(alpha);
    if (base == "example2")
        return example2(alpha);
    throw UnknownProblemError("unknown built-in problem '" + std::string(name) + "'");
}

} // namespace fracvar
