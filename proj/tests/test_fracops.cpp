#include "fracvar/fracops.hpp"
#include "fracvar/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracvar;

namespace {

double max_abs_error(const SampledSignal& s, auto&& exact, std::size_t from, std::size_t to)
{
    double e = 0.0;
    for (std::size_t j = from; j <= to; ++j)
        e = std::max(e, std::abs(s[j] - exact(s.grid.node(j))));
    return e;
}

// (-1)^k C(alpha, k) from the product formula, no recurrence
double binomial_weight(double alpha, int k)
{
    double num = 1.0;
    double fact = 1.0;
    for (int i = 0; i < k; ++i) {
        num *= alpha - i;
        fact *= i + 1;
    }
    return (k % 2 ? -1.0 : 1.0) * num / fact;
}

} // namespace

TEST_CASE("gamma reference values")
{
    CHECK(fracvar::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fracvar::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(fracvar::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(fracvar::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(fracvar::gamma(2.5) == doctest::Approx(0.75 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(fracvar::gamma(0.25) == doctest::Approx(3.6256099082219083).epsilon(1e-13));
}

TEST_CASE("gamma satisfies the functional equation")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 25.0);
    for (int i = 0; i < 500; ++i) {
        const double x = u(rng);
        CHECK(std::abs(fracvar::gamma(x + 1.0) / (x * fracvar::gamma(x)) - 1.0) < 1e-12);
    }
}

TEST_CASE("gamma poles and reciprocal gamma")
{
    CHECK_THROWS_AS(fracvar::gamma(0.0), PoleError);
    CHECK_THROWS_AS(fracvar::gamma(-3.0), PoleError);
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-2.0) == 0.0);
    // 1/Γ(ε) ≈ ε near the pole
    CHECK(rgamma(1e-9) == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(rgamma(-1e-9) == doctest::Approx(-1e-9).epsilon(1e-6));
    CHECK(rgamma(2.5) * fracvar::gamma(2.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("GL weights")
{
    SUBCASE("zero length")
    {
        const auto w = gl_weights(0.5, 0);
        REQUIRE(w.size() == 1);
        CHECK(w[0] == 1.0);
    }
    SUBCASE("half order")
    {
        const auto w = gl_weights(0.5, 3);
        CHECK(w[0] == 1.0);
        CHECK(w[1] == -0.5);
        CHECK(w[2] == -0.125);
        CHECK(w[3] == -0.0625);
    }
    SUBCASE("integer order is a backward difference")
    {
        const auto w = gl_weights(1.0, 3);
        CHECK(w.w == std::vector<double>{1.0, -1.0, 0.0, 0.0});
    }
    SUBCASE("recurrence matches the product formula")
    {
        for (double alpha : {0.25, 0.5, 0.75}) {
            const auto w = gl_weights(alpha, 20);
            for (int k = 0; k <= 20; ++k)
                CHECK(std::abs(w[k] - binomial_weight(alpha, k)) < 1e-12);
        }
    }
}

TEST_CASE("GL weight partial sums are positive, decreasing and vanish")
{
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto w = gl_weights(alpha, 10000);
        double sum = 0.0, prev = 2.0;
        for (std::size_t m = 0; m <= 10000; ++m) {
            sum += w[m];
            if (m >= 1)
                CHECK_MESSAGE(w[m] < 0.0, "m = " << m);
            CHECK(sum > 0.0);
            CHECK(sum < prev);
            prev = sum;
            // closed form: Γ(m+1-α) / (Γ(1-α) Γ(m+1))
            if (m % 1000 == 0 || m < 5) {
                const double closed = std::exp(std::lgamma(m + 1.0 - alpha) - std::lgamma(1.0 - alpha) -
                                               std::lgamma(m + 1.0));
                CHECK(sum == doctest::Approx(closed).epsilon(1e-9));
            }
        }
        CHECK(sum < 0.1);
    }
}

TEST_CASE("caputo_left of a constant vanishes at first order")
{
    const FracOrder alpha(0.5);
    double prev = 0.0;
    for (std::size_t n : {100, 200, 400}) {
        const Grid g(0.0, 1.0, n);
        const auto d = caputo_left(sample(g, [](double) { return 3.0; }), alpha);
        REQUIRE(d.flagged == std::optional<std::size_t>(0));
        const double mid = std::abs(d[n / 2]);
        if (prev > 0.0)
            CHECK(prev / mid == doctest::Approx(2.0).epsilon(0.05));
        prev = mid;
        for (std::size_t j = n / 10; j <= n; ++j)
            CHECK(std::abs(d[j]) < 2.0 * g.h() / std::pow(g.node(j), 1.5));
    }
}

TEST_CASE("caputo_left of t^2 converges at first order")
{
    const FracOrder alpha(0.5);
    const double c = fracvar::gamma(3.0) / fracvar::gamma(2.5);
    auto exact = [c](double t) { return c * std::pow(t, 1.5); };
    std::vector<double> errs;
    for (std::size_t n : {100, 200, 400}) {
        const Grid g(0.0, 10.0, n);
        const auto d = caputo_left(sample(g, [](double t) { return t * t; }), alpha);
        errs.push_back(max_abs_error(d, exact, 1, n));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double ratio = errs[i] / errs[i + 1];
        CHECK(ratio >= 1.7);
        CHECK(ratio <= 2.3);
    }
}

TEST_CASE("caputo_left at order one is the backward difference")
{
    const Grid g(0.0, 2.0, 40);
    const auto x = sample(g, [](double t) { return std::sin(3.0 * t) + 1.0; });
    const auto d = caputo_left(x, FracOrder(1.0));
    for (std::size_t j = 1; j <= g.n(); ++j)
        CHECK(d[j] == doctest::Approx((x[j] - x[j - 1]) / g.h()).epsilon(1e-12));
}

TEST_CASE("caputo_left is linear")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    const Grid g(-1.0, 2.0, 64);
    const FracOrder alpha(0.3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = sample(g, [&](double) { return nd(rng); });
        const auto y = sample(g, [&](double) { return nd(rng); });
        const double c1 = nd(rng), c2 = nd(rng);
        std::vector<double> z(g.size());
        for (std::size_t j = 0; j < z.size(); ++j)
            z[j] = c1 * x[j] + c2 * y[j];
        const auto dz = caputo_left(SampledSignal(g, z), alpha);
        const auto dx = caputo_left(x, alpha);
        const auto dy = caputo_left(y, alpha);
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double scale = std::abs(c1 * dx[j]) + std::abs(c2 * dy[j]) + 1.0;
            CHECK(std::abs(dz[j] - (c1 * dx[j] + c2 * dy[j])) < 1e-12 * scale);
        }
    }
}

TEST_CASE("caputo_left rejects orders outside (0, 1]")
{
    const Grid g(0.0, 1.0, 10);
    const auto x = sample(g, [](double t) { return t; });
    CHECK_THROWS_AS(caputo_left(x, FracOrder(1.5)), std::domain_error);
    CHECK_THROWS_AS(rl_right_derivative(x, FracOrder(1.2)), std::domain_error);
    CHECK_THROWS_AS(rl_right_integral(x, 0.0), std::domain_error);
    CHECK_THROWS_AS(FracOrder(-0.5), std::invalid_argument);
}

TEST_CASE("rl_right_derivative")
{
    const FracOrder alpha(0.5);
    SUBCASE("zero in, zero out")
    {
        const Grid g(0.0, 1.0, 50);
        const auto d = rl_right_derivative(sample(g, [](double) { return 0.0; }), alpha);
        for (double v : d.values)
            CHECK(v == 0.0);
        CHECK(d.flagged == std::optional<std::size_t>(50));
    }
    SUBCASE("constant follows the boundary term")
    {
        double prev = 0.0;
        for (std::size_t n : {100, 200, 400}) {
            const Grid g(0.0, 1.0, n);
            const auto d = rl_right_derivative(sample(g, [](double) { return 2.0; }), alpha);
            const double exact = 2.0 * std::pow(0.5, -0.5) / fracvar::gamma(0.5);
            const double err = std::abs(d[n / 2] - exact);
            if (prev > 0.0)
                CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
            prev = err;
        }
    }
    SUBCASE("power rule on (b - t)^2")
    {
        std::vector<double> errs;
        for (std::size_t n : {100, 200, 400}) {
            const Grid g(0.0, 1.0, n);
            const auto d = rl_right_derivative(
                sample(g, [](double t) { return (1.0 - t) * (1.0 - t); }), alpha);
            errs.push_back(max_abs_error(
                d, [](double t) { return 2.0 / fracvar::gamma(2.5) * std::pow(1.0 - t, 1.5); }, 0, n - 1));
        }
        CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.15));
        CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.15));
        CHECK(errs[2] < 5e-3);
    }
}

TEST_CASE("right derivative is the reflected left GL sum")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g(0.5, 3.0, 37);
    const auto phi = sample(g, [&](double) { return u(rng); });
    for (double alpha : {0.2, 0.5, 0.9}) {
        const auto right = rl_right_derivative(phi, FracOrder(alpha));
        const auto left = reflect(grunwald_left(reflect(phi), gl_weights(alpha, g.n())));
        CHECK(right.values == left.values);
    }
}

TEST_CASE("rl_right_integral")
{
    SUBCASE("constant")
    {
        const double beta = 0.4;
        double prev = 0.0;
        for (std::size_t n : {100, 200, 400}) {
            const Grid g(0.0, 2.0, n);
            const auto I = rl_right_integral(sample(g, [](double) { return 1.5; }), beta);
            const double t = g.node(n / 2);
            const double exact = 1.5 * std::pow(2.0 - t, beta) / fracvar::gamma(beta + 1.0);
            const double err = std::abs(I[n / 2] - exact);
            if (prev > 0.0)
                CHECK(prev / err == doctest::Approx(2.0).epsilon(0.1));
            prev = err;
        }
    }
    SUBCASE("zero")
    {
        const Grid g(0.0, 1.0, 20);
        const auto I = rl_right_integral(sample(g, [](double) { return 0.0; }), 0.5);
        for (double v : I.values)
            CHECK(v == 0.0);
    }
    SUBCASE("order one approaches the ordinary integral")
    {
        for (double beta : {1.0, 0.999}) {
            std::vector<double> errs;
            for (std::size_t n : {50, 100, 200}) {
                const Grid g(0.0, 1.0, n);
                const auto phi = sample(g, [](double t) { return std::cos(t); });
                const auto I = rl_right_integral(phi, beta);
                // trapezoid oracle for ∫_t^b phi
                double err = 0.0, tail = 0.0;
                for (std::size_t j = n; j-- > 0;) {
                    tail += 0.5 * g.h() * (phi[j] + phi[j + 1]);
                    err = std::max(err, std::abs(I[j] - tail));
                }
                errs.push_back(err);
            }
            CHECK(errs[2] < errs[1]);
            CHECK(errs[1] < errs[0]);
            CHECK(errs[2] < 2e-2);
        }
    }
}

TEST_CASE("caputo_left_higher")
{
    const FracOrder alpha(1.5);
    SUBCASE("annihilates the Taylor polynomial")
    {
        const Grid g(0.0, 1.0, 100);
        const double init[] = {1.0, 2.0};
        const auto d = caputo_left_higher(sample(g, [](double t) { return 1.0 + 2.0 * t; }), alpha, init);
        for (double v : d.values)
            CHECK(std::abs(v) < 1e-10);
    }
    SUBCASE("zero")
    {
        const Grid g(0.0, 1.0, 20);
        const double init[] = {0.0, 0.0};
        const auto d = caputo_left_higher(sample(g, [](double) { return 0.0; }), alpha, init);
        for (double v : d.values)
            CHECK(v == 0.0);
    }
    SUBCASE("t^2 at order 1.5")
    {
        const double init[] = {0.0, 0.0};
        double prev = 0.0;
        for (std::size_t n : {100, 200, 400}) {
            const Grid g(0.0, 1.0, n);
            const auto d = caputo_left_higher(sample(g, [](double t) { return t * t; }), alpha, init);
            const double err = max_abs_error(
                d, [](double t) { return 2.0 / fracvar::gamma(1.5) * std::sqrt(t); }, n / 10, n);
            if (prev > 0.0)
                CHECK(prev / err == doctest::Approx(2.0).epsilon(0.15));
            prev = err;
        }
    }
    SUBCASE("missing initial derivatives")
    {
        const Grid g(0.0, 1.0, 20);
        const double init[] = {0.0};
        CHECK_THROWS_AS(caputo_left_higher(sample(g, [](double t) { return t; }), alpha, init),
                        std::invalid_argument);
    }
}

TEST_CASE("grid nodes")
{
    const Grid g(0.1, 0.7, 3);
    CHECK(g.node(0) == 0.1);
    CHECK(g.node(3) == 0.7);
    CHECK_THROWS_AS(Grid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(SampledSignal(g, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledSignal(g, {1.0, 2.0, NAN, 3.0}), std::invalid_argument);
}
