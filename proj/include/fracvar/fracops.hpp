#pragma once

#include "fracvar/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fracvar {

/**
 * Grünwald–Letnikov weights w_k = (-1)^k C(alpha, k), k = 0..m, built with the
 * recurrence w_k = w_{k-1} (k - 1 - alpha) / k. A negative alpha gives the
 * weights of the fractional integral of order -alpha.
 */
struct GLWeights {
    double alpha;
    std::vector<double> w;

    double operator[](std::size_t k) const { return w[k]; }
    std::size_t size() const noexcept { return w.size(); }
};

GLWeights gl_weights(double alpha, std::size_t m);

/// Truncated left GL sum h^{-alpha} sum_{k=0}^{j} w_k x(t_{j-k}) at every node.
/// `weights` must hold at least n+1 entries of the matching order.
SampledSignal grunwald_left(const SampledSignal& x, const GLWeights& weights);

/**
 * Left Caputo derivative approximation of order 0 < alpha <= 1:
 *
 *   D x(t_j) = h^{-alpha} sum_{k=0}^{j} w_k x(t_{j-k}) - x(a) (t_j - a)^{-alpha} / Γ(1-alpha)
 *
 * for j >= 1. The correction is singular at t_0, so node 0 carries a copy of
 * node 1 and is flagged.
 */
SampledSignal caputo_left(const SampledSignal& x, FracOrder alpha);
SampledSignal caputo_left(const SampledSignal& x, FracOrder alpha, const GLWeights& weights);

/// Caputo derivative of order alpha in (i-1, i), i >= 2, computed as the GL sum of
/// x minus its Taylor polynomial at a. initial_derivs holds x(a), x'(a), ...
/// and needs at least i entries.
SampledSignal caputo_left_higher(const SampledSignal& x, FracOrder alpha,
                                 std::span<const double> initial_derivs);

/// Right Riemann–Liouville derivative of order 0 < alpha <= 1 by GL on the
/// reflected axis: h^{-alpha} sum_{k=0}^{n-j} w_k phi(t_{j+k}). Node n is flagged.
SampledSignal rl_right_derivative(const SampledSignal& phi, FracOrder alpha);
SampledSignal rl_right_derivative(const SampledSignal& phi, FracOrder alpha,
                                  const GLWeights& weights);

/// Right Riemann–Liouville integral of order 0 < beta <= 1:
/// h^{beta} sum_{k=0}^{n-j} w_k^{(-beta)} phi(t_{j+k}).
SampledSignal rl_right_integral(const SampledSignal& phi, double beta);

/// Right Caputo derivative from the right RL one: subtracts
/// phi(b) / (Γ(1-alpha) (b-t)^alpha). Node n is singular and flagged.
SampledSignal caputo_right(const SampledSignal& phi, FracOrder alpha);

/// Signal with values in reverse node order, i.e. phi(a + b - t).
SampledSignal reflect(const SampledSignal& s);

/// k-th derivative by repeated second-order finite differences
/// (central inside, one-sided at the ends).
SampledSignal finite_difference(const SampledSignal& s, int k);

} // namespace fracvar
