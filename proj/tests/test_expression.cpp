#include "fracvar/expression.hpp"
#include "fracvar/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracvar;

namespace {

Environment env_txd(double t, double x, double d)
{
    Environment env{};
    env[static_cast<std::size_t>(Var::t)] = t;
    env[static_cast<std::size_t>(Var::x)] = x;
    env[static_cast<std::size_t>(Var::d)] = d;
    return env;
}

double eval(std::string_view src, double t = 0.0, double x = 0.0, double d = 0.0)
{
    return parse(src).evaluate(env_txd(t, x, d));
}

Expression random_tree(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    switch (pick(rng)) {
    case 0: return Expression::number(std::round(value(rng) * 1000.0) / 997.0);
    case 1: {
        const Var vars[] = {Var::t, Var::x, Var::d};
        return Expression::variable(vars[std::uniform_int_distribution<int>(0, 2)(rng)]);
    }
    case 2: return Expression::negate(random_tree(rng, depth - 1));
    case 3: {
        const BinaryOp ops[] = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div, BinaryOp::pow};
        const auto op = ops[std::uniform_int_distribution<int>(0, 4)(rng)];
        auto lhs = random_tree(rng, depth - 1);
        auto rhs = op == BinaryOp::pow ? Expression::number(std::uniform_int_distribution<int>(-2, 3)(rng))
                                       : random_tree(rng, depth - 1);
        return Expression::binary(op, lhs, rhs);
    }
    default: {
        const Func fs[] = {Func::sin, Func::cos, Func::exp, Func::ln, Func::sqrt, Func::abs, Func::gammafn};
        return Expression::call(fs[std::uniform_int_distribution<int>(0, 6)(rng)], random_tree(rng, depth - 1));
    }
    }
}

} // namespace

TEST_CASE("spec expressions")
{
    const double c = 2.0 / fracvar::gamma(1.5);
    CHECK(std::abs(eval("(d - 2/gammafn(1.5)*t^1.5)^2", 1.0, 0.0, c)) < 1e-28);
    CHECK(eval("x*(d)^2 - sin(x)", 0.0, 0.0, 3.0) == 0.0);
    CHECK(eval("2^3^2") == 512.0);
}

TEST_CASE("precedence and associativity")
{
    CHECK(eval("1 - 2 - 3") == -4.0);
    CHECK(eval("8 / 4 / 2") == 1.0);
    CHECK(eval("2 + 3 * 4") == 14.0);
    CHECK(eval("-2^2") == -4.0);
    CHECK(eval("2^-1") == 0.5);
    CHECK(eval("(1 + 2) * 3") == 9.0);
    CHECK(eval("--3") == 3.0);
    CHECK(eval("pi") == std::numbers::pi);
    CHECK(eval("1.5e2 + .5") == 150.5);
    CHECK(eval("t + x * d", 1.0, 2.0, 3.0) == 7.0);
}

TEST_CASE("functions")
{
    CHECK(eval("sin(0)") == 0.0);
    CHECK(eval("cos(0)") == 1.0);
    CHECK(eval("exp(0)") == 1.0);
    CHECK(eval("ln(1)") == 0.0);
    CHECK(eval("sqrt(16)") == 4.0);
    CHECK(eval("abs(-3)") == 3.0);
    CHECK(eval("gammafn(5)") == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(eval("(-8)^(1/3*3)") == doctest::Approx(-8.0));
}

TEST_CASE("parse errors carry a position")
{
    auto position_of = [](std::string_view src) -> std::size_t {
        try {
            parse(src);
        } catch (const ParseError& e) {
            return e.position();
        }
        FAIL("no ParseError for " << src);
        return 0;
    };
    CHECK(position_of("1 +") == 3);
    CHECK(position_of("foo(1)") == 0);
    CHECK(position_of("x + y") == 4);
    CHECK(position_of("(1 + 2") == 6);
    CHECK(position_of("1 2") == 2);
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("sin(1, 2)"), ParseError);
    CHECK_THROWS_AS(parse("sin"), ParseError);
    CHECK_THROWS_AS(parse("3 $ 4"), ParseError);
}

TEST_CASE("evaluation errors")
{
    CHECK_THROWS_AS(eval("1/x"), EvaluationError);
    CHECK_THROWS_AS(eval("ln(0)"), EvaluationError);
    CHECK_THROWS_AS(eval("sqrt(-1)"), EvaluationError);
    CHECK_THROWS_AS(eval("(-2)^0.5"), EvaluationError);
    CHECK_THROWS_AS(eval("gammafn(0)"), EvaluationError);
    CHECK_THROWS_AS(eval("exp(1000)"), EvaluationError);
}

TEST_CASE("variables are collected once")
{
    const auto vars = parse("x*d + x^2 - t*x").variables();
    CHECK(vars.size() == 3);
    CHECK(parse("1 + pi").variables().empty());
}

TEST_CASE("print then parse round trip on random trees")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> point(-2.0, 2.0);
    int compared = 0;
    for (int i = 0; i < 100; ++i) {
        const auto tree = random_tree(rng, 6);
        const std::string text = tree.to_string();
        const auto back = parse(text);
        CHECK_MESSAGE(back.to_string() == text, text);
        for (int k = 0; k < 10; ++k) {
            const auto env = env_txd(point(rng), point(rng), point(rng));
            double a = 0.0, b = 0.0;
            bool a_ok = true, b_ok = true;
            try { a = tree.evaluate(env); } catch (const EvaluationError&) { a_ok = false; }
            try { b = back.evaluate(env); } catch (const EvaluationError&) { b_ok = false; }
            REQUIRE_MESSAGE(a_ok == b_ok, text);
            if (a_ok) {
                CHECK_MESSAGE(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)), text);
                ++compared;
            }
        }
    }
    CHECK(compared > 200);
}
