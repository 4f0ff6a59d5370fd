#include "fracvar/io.hpp"

#include <doctest.h>

#include <sstream>

using namespace fracvar;

namespace {

const char* scalar_file = R"(# minimal problem
[problem]
a = 0
b = 1
alpha = 0.5
lagrangian = "(d - 1)^2 + x^2"
x_a = 0
x_b = free

[solver]
n = 40
tol = 1e-10
max_iter = 50
)";

std::string error_of(std::string_view text)
{
    try {
        parse_problem_text(text, "p.ini");
    } catch (const FileFormatError& e) {
        return e.what();
    }
    FAIL("no FileFormatError");
    return {};
}

} // namespace

TEST_CASE("scalar problem file")
{
    const auto spec = parse_problem_text(scalar_file, "p.ini");
    const auto& p = spec.problem;
    CHECK(p.a == 0.0);
    CHECK(p.b == 1.0);
    CHECK(p.layout == Layout::scalar);
    CHECK(p.orders[0].value() == 0.5);
    CHECK(p.boundary[0].left == 0.0);
    CHECK_FALSE(p.boundary[0].right.has_value());
    CHECK(p.lagrangian({0.0, 2.0, 3.0}) == 8.0);
    CHECK(spec.solver.n == std::optional<std::size_t>(40));
    CHECK(spec.solver.tol == std::optional<double>(1e-10));
    CHECK(spec.solver.max_iter == std::optional<int>(50));
}

TEST_CASE("constraint sections")
{
    const auto iso = parse_problem_text(R"([problem]
a = 0
b = 1
alpha = 0.5
lagrangian = d^2
x_a = 0
x_b = 1
[constraint]
kind = isoperimetric
integrand = x
level = 0.6
)", "iso");
    REQUIRE(iso.problem.is_isoperimetric());
    CHECK(std::get<IsoperimetricConstraint>(iso.problem.constraint).level == 0.6);

    const auto hol = parse_problem_text(R"([problem]
a = 0
b = 1
alpha1 = 0.5
alpha2 = 0.7
lagrangian = "d1^2 + d2^2"
x_a = 0, 0
x_b = 1, free
[constraint]
kind = holonomic
g = "x1 - x2"
)", "hol");
    REQUIRE(hol.problem.is_holonomic());
    CHECK(hol.problem.layout == Layout::two_component);
    CHECK(hol.problem.orders[1].value() == 0.7);
    CHECK(hol.problem.boundary[1].left == 0.0);
    CHECK_FALSE(hol.problem.boundary[1].right.has_value());
}

TEST_CASE("problem file errors name the location")
{
    const std::string base = "[problem]\na = 0\nb = 1\nalpha = 0.5\nlagrangian = d^2\nx_a = 0\n";
    CHECK(error_of(base) == "p.ini: [problem] x_b: missing required key");
    CHECK(error_of(base + "x_b = 1\ncolour = red\n") == "p.ini: [problem] colour: unknown key");
    CHECK(error_of(base + "x_b = one\n").find("[problem] x_b") != std::string::npos);
    CHECK(error_of(base + "x_b = 1\nx_b = 2\n").find("duplicate key") != std::string::npos);
    CHECK(error_of(base + "x_b = 1\n[extra]\n").find("p.ini:8: unknown section") != std::string::npos);

    const std::string bad_expr = "[problem]\na = 0\nb = 1\nalpha = 0.5\nlagrangian = \"d^^2\"\nx_a = 0\nx_b = 1\n";
    const auto msg = error_of(bad_expr);
    CHECK(msg.find("[problem] lagrangian") != std::string::npos);
    CHECK(msg.find("position 2") != std::string::npos);

    CHECK(error_of("[problem]\na = zero\n").find("[problem] a: expected a decimal real") != std::string::npos);
    CHECK(error_of("[problem]\na = 0\nb = 1\nalpha = 1.5\n").find("[problem] alpha") != std::string::npos);
    CHECK(error_of("a = 1\n").find("outside of any section") != std::string::npos);
    CHECK(error_of("").find("missing [problem]") != std::string::npos);
    CHECK(error_of(base + "x_b = 1\n[constraint]\nkind = other\n").find("[constraint] kind") != std::string::npos);
    CHECK(error_of(base + "x_b = 1\n[solver]\nn = 1\n").find("[solver] n") != std::string::npos);
}

TEST_CASE("real formatting")
{
    CHECK(format_real(2.0) == "2.0");
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(100.0) == "100.0");
    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
    CHECK(format_real(-1e-20) == "-1e-20");
}

TEST_CASE("solution round trip")
{
    const Grid g(0.0, 1.0, 4);
    const Trajectory x(SampledSignal(g, {0.0, 0.1, 0.4, 0.9, 1.0}));
    std::ostringstream out;
    write_solution(out, x, std::string("converged"));
    CHECK(out.str() == "t,x\n0,0\n0.25,0.1\n0.5,0.4\n0.75,0.9\n1,1\n# converged\n");
    std::istringstream in(out.str());
    const auto back = read_solution(in, "s.csv");
    CHECK(back.grid == g);
    CHECK(back[0].values == x[0].values);
}

TEST_CASE("two-component solution")
{
    const Grid g(0.0, 2.0, 2);
    const Trajectory x({SampledSignal(g, {0.0, 1.0, 2.0}), SampledSignal(g, {3.0, 4.0, 5.0})});
    std::ostringstream out;
    write_solution(out, x);
    CHECK(out.str() == "t,x1,x2\n0,0,3\n1,1,4\n2,2,5\n");
    std::istringstream in(out.str());
    CHECK(read_solution(in, "s.csv").size() == 2);
}

TEST_CASE("malformed solutions")
{
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_solution(in, "s.csv");
    };
    CHECK_THROWS_AS(read("t,x\n0,0\n1,1\n"), FileFormatError);
    CHECK_THROWS_AS(read("t,y\n0,0\n0.5,1\n1,1\n"), FileFormatError);
    CHECK_THROWS_AS(read("t,x\n0,0\n0.2,1\n1,1\n"), FileFormatError);
    CHECK_THROWS_AS(read("t,x\n0,0\n0.5,abc\n1,1\n"), FileFormatError);
    CHECK_THROWS_AS(read("t,x\n0,0\n0.5\n1,1\n"), FileFormatError);
    CHECK_THROWS_AS(read(""), FileFormatError);
}
