#include "fracvar/fracops.hpp"

#include "fracvar/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracvar {

namespace {

void require_unit_order(double alpha, const char* op)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error(std::string(op) + ": order " + std::to_string(alpha) +
                                " outside (0, 1]");
}

void require_weights(const GLWeights& weights, double alpha, std::size_t needed)
{
    if (weights.alpha != alpha || weights.size() < needed)
        throw std::invalid_argument("GL weight table does not match order or grid");
}

// distance t_j - a without accumulating rounding at the last node
double offset_from_left(const Grid& g, std::size_t j)
{
    return j == g.n() ? g.b() - g.a() : static_cast<double>(j) * g.h();
}

} // namespace

GLWeights gl_weights(double alpha, std::size_t m)
{
    GLWeights out{alpha, std::vector<double>(m + 1)};
    out.w[0] = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        out.w[k] = out.w[k - 1] * (kd - 1.0 - alpha) / kd;
    }
    return out;
}

SampledSignal grunwald_left(const SampledSignal& x, const GLWeights& weights)
{
    const Grid& g = x.grid;
    require_weights(weights, weights.alpha, g.size());
    const double scale = std::pow(g.h(), -weights.alpha);
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= j; ++k)
            acc += weights.w[k] * x.values[j - k];
        out[j] = scale * acc;
    }
    return SampledSignal(g, std::move(out));
}

SampledSignal caputo_left(const SampledSignal& x, FracOrder alpha)
{
    require_unit_order(alpha.value(), "caputo_left");
    return caputo_left(x, alpha, gl_weights(alpha.value(), x.grid.n()));
}

SampledSignal caputo_left(const SampledSignal& x, FracOrder alpha, const GLWeights& weights)
{
    require_unit_order(alpha.value(), "caputo_left");
    require_weights(weights, alpha.value(), x.grid.size());
    SampledSignal d = grunwald_left(x, weights);
    const Grid& g = x.grid;
    const double coef = x.values[0] * rgamma(1.0 - alpha.value());
    if (coef != 0.0) {
        for (std::size_t j = 1; j < g.size(); ++j)
            d.values[j] -= coef * std::pow(offset_from_left(g, j), -alpha.value());
    }
    d.values[0] = d.values[1];
    d.flagged = 0;
    return d;
}

SampledSignal caputo_left_higher(const SampledSignal& x, FracOrder alpha,
                                 std::span<const double> initial_derivs)
{
    const int band = alpha.band();
    if (band < 2 || alpha.value() == static_cast<double>(band))
        throw std::domain_error("caputo_left_higher: order must lie strictly inside (i-1, i), i >= 2");
    if (initial_derivs.size() < static_cast<std::size_t>(band))
        throw std::invalid_argument("caputo_left_higher: need " + std::to_string(band) +
                                    " initial derivatives, got " +
                                    std::to_string(initial_derivs.size()));
    const Grid& g = x.grid;
    std::vector<double> y(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double s = offset_from_left(g, j);
        double taylor = 0.0;
        double term = 1.0; // s^r / r!
        for (int r = 0; r < band; ++r) {
            taylor += initial_derivs[static_cast<std::size_t>(r)] * term;
            term *= s / static_cast<double>(r + 1);
        }
        y[j] = x.values[j] - taylor;
    }
    return grunwald_left(SampledSignal(g, std::move(y)), gl_weights(alpha.value(), g.n()));
}

SampledSignal reflect(const SampledSignal& s)
{
    std::vector<double> v(s.values.rbegin(), s.values.rend());
    SampledSignal out(s.grid, std::move(v));
    if (s.flagged)
        out.flagged = s.grid.n() - *s.flagged;
    return out;
}

SampledSignal rl_right_derivative(const SampledSignal& phi, FracOrder alpha)
{
    require_unit_order(alpha.value(), "rl_right_derivative");
    return rl_right_derivative(phi, alpha, gl_weights(alpha.value(), phi.grid.n()));
}

SampledSignal rl_right_derivative(const SampledSignal& phi, FracOrder alpha,
                                  const GLWeights& weights)
{
    require_unit_order(alpha.value(), "rl_right_derivative");
    require_weights(weights, alpha.value(), phi.grid.size());
    SampledSignal out = reflect(grunwald_left(reflect(phi), weights));
    out.flagged = phi.grid.n();
    return out;
}

SampledSignal rl_right_integral(const SampledSignal& phi, double beta)
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::domain_error("rl_right_integral: order " + std::to_string(beta) +
                                " outside (0, 1]");
    return reflect(grunwald_left(reflect(phi), gl_weights(-beta, phi.grid.n())));
}

SampledSignal caputo_right(const SampledSignal& phi, FracOrder alpha)
{
    SampledSignal out = rl_right_derivative(phi, alpha);
    const Grid& g = phi.grid;
    const double coef = phi.values[g.n()] * rgamma(1.0 - alpha.value());
    if (coef != 0.0) {
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double dist = g.b() - g.node(j);
            out.values[j] -= coef * std::pow(dist, -alpha.value());
        }
    }
    // singular at t = b; keep the neighbour's value as a placeholder
    out.values[g.n()] = out.values[g.n() - 1];
    out.flagged = g.n();
    return out;
}

SampledSignal finite_difference(const SampledSignal& s, int k)
{
    if (k < 0)
        throw std::invalid_argument("finite_difference: negative order");
    const Grid& g = s.grid;
    const std::size_t n = g.n();
    const double h = g.h();
    std::vector<double> cur = s.values;
    for (int pass = 0; pass < k; ++pass) {
        std::vector<double> next(cur.size());
        for (std::size_t j = 1; j < n; ++j)
            next[j] = (cur[j + 1] - cur[j - 1]) / (2.0 * h);
        if (n >= 2) {
            next[0] = (-3.0 * cur[0] + 4.0 * cur[1] - cur[2]) / (2.0 * h);
            next[n] = (3.0 * cur[n] - 4.0 * cur[n - 1] + cur[n - 2]) / (2.0 * h);
        }
        cur = std::move(next);
    }
    return SampledSignal(g, std::move(cur));
}

} // namespace fracvar
