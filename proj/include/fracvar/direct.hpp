#pragma once

#include "fracvar/fracops.hpp"
#include "fracvar/grid.hpp"
#include "fracvar/problem.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fracvar {

/// Sampled candidate x (one signal per component) on a shared grid.
struct Trajectory {
    Grid grid;
    std::vector<SampledSignal> components;

    explicit Trajectory(SampledSignal x);
    explicit Trajectory(std::vector<SampledSignal> xs);

    const SampledSignal& operator[](std::size_t i) const { return components[i]; }
    std::size_t size() const noexcept { return components.size(); }
};

/**
 * Ψ(x_1, ..., x_{N-1}) = Σ_{k=1}^{N} h L(t_k, x(t_k), D x(t_k)) for a scalar
 * problem, with the fixed boundary values substituted. Unknowns are the
 * interior nodes plus any free endpoint, in node order.
 */
class DiscretizedObjective {
public:
    DiscretizedObjective(VariationalProblem problem, std::size_t n);

    const VariationalProblem& problem() const noexcept { return problem_; }
    const Grid& grid() const noexcept { return grid_; }
    const std::vector<std::size_t>& free_indices() const noexcept { return free_; }
    std::size_t unknown_count() const noexcept { return free_.size(); }

    /// Node values with boundary data filled in.
    std::vector<double> expand(std::span<const double> unknowns) const;
    /// Free-node values of a full sample vector.
    std::vector<double> restrict_to_free(std::span<const double> nodes) const;

    double value(std::span<const double> unknowns) const;
    std::vector<double> gradient(std::span<const double> unknowns) const;

    /// Same quadrature and gradient for another integrand on this grid
    /// (used for isoperimetric constraints).
    double functional(const Lagrangian& f, std::span<const double> unknowns) const;
    std::vector<double> functional_gradient(const Lagrangian& f,
                                            std::span<const double> unknowns) const;

private:
    SampledSignal derivative(const std::vector<double>& x) const;

    VariationalProblem problem_;
    Grid grid_;
    FracOrder order_;
    GLWeights weights_;
    std::vector<std::size_t> free_;
};

struct SolverOptions {
    double tol = 1e-9;
    int max_iter = 200;
    int damping_max = 30;
    std::optional<Trajectory> seed;
};

struct SolveReport {
    Trajectory trajectory;
    int iterations = 0;
    /// Sup norm of the stationarity system (gradient, plus the constraint row
    /// for isoperimetric problems).
    double gradient_norm = 0.0;
    double objective_value = 0.0;
    std::optional<double> multiplier;
    bool converged = false;
    /// Isoperimetric only: the constraint functional is itself stationary at
    /// the solution, so the multiplier rule may be abnormal.
    bool possibly_abnormal = false;
    std::optional<double> constraint_value;
    std::string diagnostics;
};

/**
 * Solves ∇Ψ = 0 by damped Newton with a finite-difference Jacobian of the
 * analytic gradient. Isoperimetric problems get one extra unknown λ and the
 * row G(x) - K = 0, with F = L + λM in the gradient.
 *
 * Scalar problems with 0 < α < 1 only.
 */
SolveReport solve(const VariationalProblem& problem, std::size_t n,
                  const SolverOptions& options = {});

struct AnalyticReference {
    Expression solution;
};
struct FinestReference {};
using Reference = std::variant<AnalyticReference, FinestReference>;

struct ConvergenceRow {
    std::size_t n;
    std::optional<double> error;
    std::optional<double> order;
    bool converged = false;
    int iterations = 0;
    std::string failure;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool monotone = false;
    bool any_failed = false;
};

/**
 * Solves on each n and reports the max nodal deviation from the reference,
 * plus the empirical order log(e_i / e_{i+1}) / log(n_{i+1} / n_i).
 * Solves run concurrently; rows come back in input order.
 */
ConvergenceTable convergence_study(const VariationalProblem& problem,
                                   std::span<const std::size_t> n_list,
                                   const Reference& reference,
                                   const SolverOptions& options = {});

} // namespace fracvar
