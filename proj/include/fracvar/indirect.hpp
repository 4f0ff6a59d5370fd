#pragma once

#include "fracvar/direct.hpp"
#include "fracvar/grid.hpp"
#include "fracvar/problem.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracvar {

/// A theorem hypothesis fails on the supplied trajectory.
class HypothesisError : public std::domain_error {
public:
    explicit HypothesisError(const std::string& what) : std::domain_error(what) {}
};

struct ResidualOptions {
    /// Share of nodes dropped at each end before taking the sup norm.
    double band_fraction = 0.05;
    /// Replaces the discrete left Caputo derivative feeding L's derivative
    /// slots (one signal per slot), e.g. with analytic values.
    std::vector<SampledSignal> derivative_override;
};

struct ResidualReport {
    /// Per-component Euler–Lagrange residual; node n is flagged (boundary).
    std::vector<SampledSignal> el_residual;
    double sup_norm_interior = 0.0;
    std::size_t band_lo = 0;
    std::size_t band_hi = 0;
    std::optional<double> transversality_left;
    std::optional<double> transversality_right;
    /// Minimum of ∂²₃₃L over nodes 1..n (scalar problems).
    std::optional<double> legendre_min;
    /// Holonomic multiplier λ(t_j).
    std::optional<SampledSignal> multiplier_profile;
    /// Isoperimetric multiplier as supplied.
    std::optional<double> multiplier;
    /// Isoperimetric: sup norm of the residual of M alone. Near zero means the
    /// abnormal multiplier rule may apply.
    std::optional<double> abnormal_residual;
    /// Holonomic: the residual parts ∂_{i+1}L + ᶜD_{b-}(∂_{i+3}L) before the
    /// multiplier term.
    std::vector<SampledSignal> unconstrained_parts;
    /// Holonomic: max |g(t_j, x(t_j))|.
    std::optional<double> constraint_violation;
};

/// ∂_{i+1}L + D_{b-}^{α_i}(∂_{i+1+m}L) per component, plus transversality
/// values I_{b-}^{1-α}(∂₃L) at any free endpoint.
ResidualReport el_residual(const VariationalProblem& problem, const Trajectory& x,
                           const ResidualOptions& options = {});

/// Residual for F = L + λM; also reports the M-only residual.
ResidualReport isoperimetric_residual(const VariationalProblem& problem, const Trajectory& x,
                                      double lambda, const ResidualOptions& options = {});

/**
 * Two-component problem with g(t, x1, x2) = 0. λ(t) is eliminated from the
 * second equation, λ = -(∂₃L + ᶜD_{b-}(∂₅L)) / ∂₃g, and the first equation's
 * residual ∂₂L + ᶜD_{b-}(∂₄L) + λ ∂₂g is reported.
 * Throws HypothesisError when |∂₃g| < 1e-10 at some node.
 */
ResidualReport holonomic_residual(const VariationalProblem& problem, const Trajectory& x,
                                  const ResidualOptions& options = {});

/**
 * ∂₂L + Σ_i D_{b-}^{α_i}(∂_{i+2}L) for L(t, x, D^{α_1}x, ..., D^{α_m}x) with
 * α_i in (i-1, i). Right derivatives above order one are the fractional part
 * followed by integer central differences. initial_derivs holds
 * x(a), x'(a), ..., x^{(m-1)}(a).
 */
ResidualReport higher_order_residual(const VariationalProblem& problem, const Trajectory& x,
                                     std::span<const double> initial_derivs,
                                     const ResidualOptions& options = {});

/// min over nodes 1..n of ∂²₃₃L along the trajectory.
double legendre_check(const VariationalProblem& problem, const Trajectory& x);

struct ConvexityOptions {
    /// Half-width of the sampling box for x, y = d, v and w.
    double half_width = 10.0;
    double tolerance = 1e-9;
    std::uint64_t seed = 20190611;
};

struct ConvexityResult {
    bool pass = false;
    double worst_margin = 0.0;
    /// (t, x, y, v, w) of the worst sample.
    std::array<double, 5> worst_point{};
};

/**
 * Samples L(t, x+v, y+w) - L(t, x, y) - ∂₂L v - ∂₃L w over the box. Passing is
 * evidence of convexity, not a proof.
 */
ConvexityResult convexity_check(const VariationalProblem& problem, int samples,
                                const ConvexityOptions& options = {});

enum class Verdict { not_extremal, candidate, global_minimizer_sampled };

/// Residual below `tolerance` makes a candidate; sampled convexity upgrades it.
Verdict classify(const ResidualReport& report, double tolerance,
                 const std::optional<ConvexityResult>& convexity);

std::string to_string(Verdict v);

} // namespace fracvar
