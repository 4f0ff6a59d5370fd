#include "fracvar/direct.hpp"

#include "fracvar/special.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace fracvar {

Trajectory::Trajectory(SampledSignal x) : grid(x.grid), components{std::move(x)} {}

Trajectory::Trajectory(std::vector<SampledSignal> xs) : grid(xs.at(0).grid), components(std::move(xs))
{
    for (const auto& c : components)
        if (!(c.grid == grid))
            throw std::invalid_argument("trajectory components must share one grid");
}

DiscretizedObjective::DiscretizedObjective(VariationalProblem problem, std::size_t n)
    : problem_(std::move(problem)),
      grid_(problem_.a, problem_.b, n),
      order_(problem_.orders.at(0)),
      weights_(gl_weights(order_.value(), n))
{
    problem_.validate();
    if (problem_.layout != Layout::scalar)
        throw std::invalid_argument("direct method handles scalar problems only");
    const BoundaryCondition& bc = problem_.boundary[0];
    if (!bc.left)
        free_.push_back(0);
    for (std::size_t j = 1; j < n; ++j)
        free_.push_back(j);
    if (!bc.right)
        free_.push_back(n);
}

std::vector<double> DiscretizedObjective::expand(std::span<const double> unknowns) const
{
    if (unknowns.size() != free_.size())
        throw std::invalid_argument("objective: expected " + std::to_string(free_.size()) +
                                    " unknowns, got " + std::to_string(unknowns.size()));
    std::vector<double> x(grid_.size());
    const BoundaryCondition& bc = problem_.boundary[0];
    if (bc.left)
        x.front() = *bc.left;
    if (bc.right)
        x.back() = *bc.right;
    for (std::size_t i = 0; i < free_.size(); ++i)
        x[free_[i]] = unknowns[i];
    return x;
}

std::vector<double> DiscretizedObjective::restrict_to_free(std::span<const double> nodes) const
{
    std::vector<double> u(free_.size());
    for (std::size_t i = 0; i < free_.size(); ++i)
        u[i] = nodes[free_[i]];
    return u;
}

SampledSignal DiscretizedObjective::derivative(const std::vector<double>& x) const
{
    return caputo_left(SampledSignal(grid_, x), order_, weights_);
}

double DiscretizedObjective::value(std::span<const double> unknowns) const
{
    return functional(problem_.lagrangian, unknowns);
}

std::vector<double> DiscretizedObjective::gradient(std::span<const double> unknowns) const
{
    return functional_gradient(problem_.lagrangian, unknowns);
}

double DiscretizedObjective::functional(const Lagrangian& f, std::span<const double> unknowns) const
{
    const std::vector<double> x = expand(unknowns);
    const SampledSignal d = derivative(x);
    const double h = grid_.h();
    double sum = 0.0;
    for (std::size_t k = 1; k < grid_.size(); ++k)
        sum += h * f({grid_.node(k), x[k], d[k]});
    return sum;
}

std::vector<double> DiscretizedObjective::functional_gradient(const Lagrangian& f,
                                                              std::span<const double> unknowns) const
{
    const std::vector<double> x = expand(unknowns);
    const SampledSignal d = derivative(x);
    const std::size_t N = grid_.n();
    const double h = grid_.h();
    const double alpha = order_.value();

    std::vector<double> px(N + 1, 0.0), pd(N + 1, 0.0);
    for (std::size_t k = 1; k <= N; ++k) {
        const double args[] = {grid_.node(k), x[k], d[k]};
        px[k] = partial(f, 2, args);
        pd[k] = partial(f, 3, args);
    }

    // x_i enters D x(t_k) for every k >= i with weight w_{k-i} / h^alpha
    const double scale = h * std::pow(h, -alpha);
    std::vector<double> g(free_.size());
    for (std::size_t u = 0; u < free_.size(); ++u) {
        const std::size_t i = free_[u];
        double conv = 0.0;
        for (std::size_t k = std::max<std::size_t>(i, 1); k <= N; ++k)
            conv += pd[k] * weights_[k - i];
        double gi = scale * conv;
        if (i >= 1) {
            gi += h * px[i];
        } else {
            // x(a) also drives the singular correction term of every D x(t_k)
            const double c = rgamma(1.0 - alpha);
            if (c != 0.0) {
                double corr = 0.0;
                for (std::size_t k = 1; k <= N; ++k) {
                    const double dist = k == N ? grid_.b() - grid_.a() : static_cast<double>(k) * h;
                    corr += pd[k] * std::pow(dist, -alpha);
                }
                gi -= h * c * corr;
            }
        }
        g[u] = gi;
    }
    return g;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::span<const double> view(const VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool all_finite(const VectorXd& v) { return v.allFinite(); }

// Stationarity system of the (possibly bordered) problem.
class StationaritySystem {
public:
    StationaritySystem(const DiscretizedObjective& obj, const IsoperimetricConstraint* iso)
        : obj_(obj), iso_(iso)
    {
    }

    Eigen::Index unknowns() const { return static_cast<Eigen::Index>(obj_.unknown_count()); }
    Eigen::Index size() const { return unknowns() + (iso_ ? 1 : 0); }

    VectorXd residual(const VectorXd& z) const
    {
        const auto u = view(z).first(obj_.unknown_count());
        VectorXd F(size());
        F.head(unknowns()) = to_vector(obj_.gradient(u));
        if (iso_) {
            const double lambda = z[unknowns()];
            F.head(unknowns()) += lambda * to_vector(obj_.functional_gradient(iso_->integrand, u));
            F[unknowns()] = obj_.functional(iso_->integrand, u) - iso_->level;
        }
        return F;
    }

    double objective(const VectorXd& z) const
    {
        return obj_.value(view(z).first(obj_.unknown_count()));
    }

    MatrixXd jacobian(const VectorXd& z) const
    {
        const Eigen::Index m = size();
        MatrixXd J(m, m);
        const double rel = std::cbrt(std::numeric_limits<double>::epsilon());
        VectorXd zp = z, zm = z;
        for (Eigen::Index c = 0; c < m; ++c) {
            const double s = rel * std::max(1.0, std::abs(z[c]));
            zp[c] = z[c] + s;
            zm[c] = z[c] - s;
            J.col(c) = (residual(zp) - residual(zm)) / (zp[c] - zm[c]);
            zp[c] = z[c];
            zm[c] = z[c];
        }
        return J;
    }

private:
    const DiscretizedObjective& obj_;
    const IsoperimetricConstraint* iso_;
};

struct Trial {
    VectorXd z;
    VectorXd F;
    double psi = 0.0;
    bool ok = false;
};

Trial evaluate_trial(const StationaritySystem& sys, VectorXd z, bool need_objective)
{
    Trial t;
    if (!all_finite(z))
        return t;
    try {
        t.F = sys.residual(z);
        if (need_objective)
            t.psi = sys.objective(z);
        t.ok = all_finite(t.F) && std::isfinite(t.psi);
    } catch (const std::domain_error&) {
        t.ok = false;
    } catch (const std::invalid_argument&) {
        t.ok = false;
    }
    t.z = std::move(z);
    return t;
}

VectorXd initial_guess(const DiscretizedObjective& obj, const SolverOptions& options)
{
    const Grid& g = obj.grid();
    const BoundaryCondition& bc = obj.problem().boundary[0];
    std::vector<double> x(g.size());
    if (options.seed) {
        const Trajectory& seed = *options.seed;
        if (!(seed.grid == g) || seed.size() != 1)
            throw std::invalid_argument("solver seed must be a scalar trajectory on the solve grid");
        x = seed[0].values;
    } else {
        const double left = bc.left.value_or(bc.right.value_or(0.0));
        const double right = bc.right.value_or(bc.left.value_or(0.0));
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double s = (g.node(j) - g.a()) / (g.b() - g.a());
            x[j] = left + s * (right - left);
        }
    }
    return to_vector(obj.restrict_to_free(x));
}

// Minimises Ψ: Newton on ∇Ψ = 0 with Levenberg regularisation when the
// plain step does not decrease Ψ.
void newton_unconstrained(const StationaritySystem& sys, VectorXd& z, SolveReport& report,
                          const SolverOptions& options)
{
    VectorXd F = sys.residual(z);
    double psi = sys.objective(z);
    double mu = 0.0;
    for (;;) {
        report.gradient_norm = F.lpNorm<Eigen::Infinity>();
        if (report.gradient_norm <= options.tol) {
            report.converged = true;
            report.diagnostics = "converged";
            return;
        }
        if (report.iterations >= options.max_iter) {
            report.diagnostics = "iteration cap reached";
            return;
        }
        MatrixXd H = sys.jacobian(z);
        H = 0.5 * (H + H.transpose()).eval();
        const double mu_floor = 1e-10 * std::max(H.diagonal().cwiseAbs().maxCoeff(),
                                                 std::numeric_limits<double>::min());
        const MatrixXd I = MatrixXd::Identity(H.rows(), H.cols());

        bool accepted = false;
        Trial trial;
        for (int attempt = 0; attempt <= options.damping_max; ++attempt) {
            const VectorXd step = (H + mu * I).partialPivLu().solve(-F);
            trial = evaluate_trial(sys, z + step, true);
            if (trial.ok) {
                const double gn = trial.F.lpNorm<Eigen::Infinity>();
                const bool descent = trial.psi < psi;
                const bool flat = trial.psi <= psi + 1e-12 * std::abs(psi) &&
                                  gn < report.gradient_norm;
                if (descent || flat) {
                    accepted = true;
                    break;
                }
            }
            mu = mu == 0.0 ? mu_floor : 4.0 * mu;
        }
        if (!accepted) {
            report.diagnostics = "damping exhausted";
            return;
        }
        z = std::move(trial.z);
        F = std::move(trial.F);
        psi = trial.psi;
        mu = mu / 4.0 < mu_floor ? 0.0 : mu / 4.0;
        ++report.iterations;
    }
}

// Bordered system for isoperimetric problems: merit is ||F||_2.
void newton_bordered(const StationaritySystem& sys, VectorXd& z, SolveReport& report,
                     const SolverOptions& options)
{
    VectorXd F = sys.residual(z);
    for (;;) {
        report.gradient_norm = F.lpNorm<Eigen::Infinity>();
        if (report.gradient_norm <= options.tol) {
            report.converged = true;
            report.diagnostics = "converged";
            return;
        }
        if (report.iterations >= options.max_iter) {
            report.diagnostics = "iteration cap reached";
            return;
        }
        const MatrixXd J = sys.jacobian(z);
        const double merit = F.norm();
        bool accepted = false;
        Trial trial;

        const VectorXd step = J.partialPivLu().solve(-F);
        if (all_finite(step)) {
            double lambda = 1.0;
            for (int k = 0; k <= options.damping_max && !accepted; ++k, lambda *= 0.5) {
                trial = evaluate_trial(sys, z + lambda * step, false);
                accepted = trial.ok && trial.F.norm() < merit;
            }
        }
        if (!accepted) {
            // regularised Gauss-Newton steps on ||F||
            const MatrixXd JtJ = J.transpose() * J;
            const VectorXd rhs = -J.transpose() * F;
            double mu = 1e-10 * std::max(JtJ.diagonal().maxCoeff(), std::numeric_limits<double>::min());
            const MatrixXd I = MatrixXd::Identity(J.rows(), J.cols());
            for (int k = 0; k <= options.damping_max && !accepted; ++k, mu *= 4.0) {
                trial = evaluate_trial(sys, z + (JtJ + mu * I).ldlt().solve(rhs), false);
                accepted = trial.ok && trial.F.norm() < merit;
            }
        }
        if (!accepted) {
            report.diagnostics = "damping exhausted";
            return;
        }
        z = std::move(trial.z);
        F = std::move(trial.F);
        ++report.iterations;
    }
}

} // namespace

SolveReport solve(const VariationalProblem& problem, std::size_t n, const SolverOptions& options)
{
    problem.validate();
    if (problem.layout != Layout::scalar || problem.is_holonomic())
        throw std::invalid_argument("solve: scalar problems only");
    const double alpha = problem.orders[0].value();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("solve: order must lie in (0, 1)");

    const DiscretizedObjective obj(problem, n);
    const auto* iso = std::get_if<IsoperimetricConstraint>(&problem.constraint);
    const StationaritySystem sys(obj, iso);

    VectorXd z(sys.size());
    z.head(sys.unknowns()) = initial_guess(obj, options);
    if (iso)
        z[sys.unknowns()] = 0.0;

    SolveReport report{Trajectory(SampledSignal(obj.grid(), obj.expand(view(z).first(obj.unknown_count())))),
                       0, 0.0, 0.0, std::nullopt, false, false, std::nullopt, {}};
    if (iso)
        newton_bordered(sys, z, report, options);
    else
        newton_unconstrained(sys, z, report, options);

    const auto u = view(z).first(obj.unknown_count());
    report.trajectory = Trajectory(SampledSignal(obj.grid(), obj.expand(u)));
    report.objective_value = obj.value(u);
    if (iso) {
        report.multiplier = z[sys.unknowns()];
        report.constraint_value = obj.functional(iso->integrand, u);
        const VectorXd gM = to_vector(obj.functional_gradient(iso->integrand, u));
        report.possibly_abnormal = report.converged && gM.lpNorm<Eigen::Infinity>() <= options.tol;
    }
    return report;
}

namespace {

double interpolate(const Trajectory& fine, double t)
{
    const Grid& g = fine.grid;
    const auto& v = fine[0].values;
    double pos = (t - g.a()) / g.h();
    pos = std::clamp(pos, 0.0, static_cast<double>(g.n()));
    const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), g.n() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0)
        return v[lo];
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

} // namespace

ConvergenceTable convergence_study(const VariationalProblem& problem,
                                   std::span<const std::size_t> n_list,
                                   const Reference& reference, const SolverOptions& options)
{
    if (n_list.empty())
        throw std::invalid_argument("convergence study needs at least one grid");
    const bool finest = std::holds_alternative<FinestReference>(reference);
    const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
    if (finest && std::count(n_list.begin(), n_list.end(), n_max) == static_cast<std::ptrdiff_t>(n_list.size()))
        throw std::invalid_argument("finest-grid reference needs at least two distinct grids");

    std::vector<std::future<SolveReport>> jobs;
    for (std::size_t n : n_list)
        jobs.push_back(std::async(std::launch::async, [&problem, &options, n] {
            SolverOptions opts = options;
            opts.seed.reset();
            return solve(problem, n, opts);
        }));

    ConvergenceTable table;
    std::vector<std::optional<SolveReport>> reports;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        ConvergenceRow row{n_list[i], std::nullopt, std::nullopt, false, 0, {}};
        try {
            SolveReport r = jobs[i].get();
            row.converged = r.converged;
            row.iterations = r.iterations;
            if (!r.converged)
                row.failure = r.diagnostics;
            reports.emplace_back(std::move(r));
        } catch (const std::exception& e) {
            row.failure = e.what();
            reports.emplace_back(std::nullopt);
        }
        table.rows.push_back(std::move(row));
    }

    const SolveReport* fine = nullptr;
    if (finest) {
        for (std::size_t i = 0; i < n_list.size(); ++i)
            if (n_list[i] == n_max && reports[i] && reports[i]->converged)
                fine = &*reports[i];
    }

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        ConvergenceRow& row = table.rows[i];
        if (!reports[i] || !row.converged) {
            if (row.failure.empty())
                row.failure = "solve failed";
            continue;
        }
        const Trajectory& x = reports[i]->trajectory;
        if (finest && !fine) {
            row.failure = "finest-grid solve failed";
            continue;
        }
        double err = 0.0;
        for (std::size_t j = 0; j < x.grid.size(); ++j) {
            const double t = x.grid.node(j);
            double ref = 0.0;
            if (const auto* analytic = std::get_if<AnalyticReference>(&reference)) {
                Environment env{};
                env[static_cast<std::size_t>(Var::t)] = t;
                ref = analytic->solution.evaluate(env);
            } else {
                ref = interpolate(fine->trajectory, t);
            }
            err = std::max(err, std::abs(x[0][j] - ref));
        }
        row.error = err;
    }

    table.monotone = true;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        ConvergenceRow& row = table.rows[i];
        if (!row.error) {
            table.any_failed = true;
            table.monotone = false;
            continue;
        }
        if (i == 0 || !table.rows[i - 1].error || (finest && row.n == n_max))
            continue;
        // order is reported on the finer row of each pair
        const ConvergenceRow& prev = table.rows[i - 1];
        if (!(*row.error < *prev.error))
            table.monotone = false;
        if (*row.error > 0.0 && *prev.error > 0.0 && row.n != prev.n)
            row.order = std::log(*prev.error / *row.error) /
                        std::log(static_cast<double>(row.n) / static_cast<double>(prev.n));
    }
    return table;
}

} // namespace fracvar
