#include "fracvar/indirect.hpp"

#include "fracvar/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fracvar {

namespace {

struct Band {
    std::size_t lo;
    std::size_t hi;
};

Band interior_band(const Grid& g, double fraction)
{
    const std::size_t n = g.n();
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::size_t lo = std::max<std::size_t>(k, 1);
    std::size_t hi = n > k + 1 ? std::min(n - 1, n - k) : 1;
    if (lo > hi)
        lo = hi = n / 2;
    return {lo, hi};
}

double sup_over(const std::vector<SampledSignal>& signals, Band band)
{
    double sup = 0.0;
    for (const auto& s : signals)
        for (std::size_t j = band.lo; j <= band.hi; ++j)
            sup = std::max(sup, std::abs(s[j]));
    return sup;
}

void check_trajectory(const VariationalProblem& problem, const Trajectory& x)
{
    problem.validate();
    if (x.size() != problem.components())
        throw std::invalid_argument("trajectory has " + std::to_string(x.size()) +
                                    " components, problem expects " +
                                    std::to_string(problem.components()));
    if (x.grid.a() != problem.a || x.grid.b() != problem.b)
        throw std::invalid_argument("trajectory grid does not span the problem interval");
}

// Left Caputo derivatives feeding the derivative slots of L, one per order.
std::vector<SampledSignal> left_derivatives(const VariationalProblem& problem, const Trajectory& x,
                                            std::span<const double> initial_derivs,
                                            const ResidualOptions& options)
{
    const std::size_t slots = problem.orders.size();
    if (!options.derivative_override.empty()) {
        if (options.derivative_override.size() != slots)
            throw std::invalid_argument("derivative override needs one signal per order");
        for (const auto& s : options.derivative_override)
            if (!(s.grid == x.grid))
                throw std::invalid_argument("derivative override is on a different grid");
        return options.derivative_override;
    }
    std::vector<SampledSignal> out;
    for (std::size_t i = 0; i < slots; ++i) {
        const FracOrder alpha = problem.orders[i];
        const SampledSignal& xi = problem.layout == Layout::two_component ? x[i] : x[0];
        if (alpha.band() == 1)
            out.push_back(caputo_left(xi, alpha));
        else
            out.push_back(caputo_left_higher(xi, alpha, initial_derivs));
    }
    return out;
}

// Arguments (t, x..., d...) of L at node j.
std::vector<double> node_args(const Trajectory& x, const std::vector<SampledSignal>& d, std::size_t j)
{
    std::vector<double> args;
    args.reserve(1 + x.size() + d.size());
    args.push_back(x.grid.node(j));
    for (const auto& c : x.components)
        args.push_back(c[j]);
    for (const auto& s : d)
        args.push_back(s[j]);
    return args;
}

SampledSignal partial_along(const Lagrangian& L, std::size_t slot, const Trajectory& x,
                            const std::vector<SampledSignal>& d)
{
    std::vector<double> v(x.grid.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = partial(L, slot, node_args(x, d, j));
    return SampledSignal(x.grid, std::move(v));
}

SampledSignal add(const SampledSignal& p, const SampledSignal& q)
{
    std::vector<double> v(p.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = p[j] + q[j];
    return SampledSignal(p.grid, std::move(v));
}

double legendre_min(const Lagrangian& L, const Trajectory& x, const std::vector<SampledSignal>& d)
{
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < x.grid.size(); ++j)
        lo = std::min(lo, second_partial(L, 3, node_args(x, d, j)));
    return lo;
}

ResidualReport first_order_residual(const VariationalProblem& problem, const Lagrangian& L,
                                    const Trajectory& x, const ResidualOptions& options)
{
    if (problem.layout == Layout::higher_order)
        throw std::invalid_argument("use higher_order_residual for higher-order problems");
    const std::vector<SampledSignal> d = left_derivatives(problem, x, {}, options);
    const std::size_t m = x.size();
    const Grid& g = x.grid;

    ResidualReport report;
    for (std::size_t i = 0; i < m; ++i) {
        const SampledSignal px = partial_along(L, i + 2, x, d);
        const SampledSignal pd = partial_along(L, i + 2 + m, x, d);
        SampledSignal r = add(px, rl_right_derivative(pd, problem.orders[i]));
        r.flagged = g.n();
        report.el_residual.push_back(std::move(r));

        if (problem.layout == Layout::scalar) {
            const double beta = 1.0 - problem.orders[i].value();
            const BoundaryCondition& bc = problem.boundary[i];
            if (!bc.left || !bc.right) {
                const SampledSignal I = beta > 0.0 ? rl_right_integral(pd, beta) : pd;
                if (!bc.left)
                    report.transversality_left = I[0];
                if (!bc.right)
                    report.transversality_right = I[g.n()];
            }
        }
    }
    const Band band = interior_band(g, options.band_fraction);
    report.band_lo = band.lo;
    report.band_hi = band.hi;
    report.sup_norm_interior = sup_over(report.el_residual, band);
    if (problem.layout == Layout::scalar)
        report.legendre_min = legendre_min(L, x, d);
    return report;
}

} // namespace

ResidualReport el_residual(const VariationalProblem& problem, const Trajectory& x,
                           const ResidualOptions& options)
{
    check_trajectory(problem, x);
    return first_order_residual(problem, problem.lagrangian, x, options);
}

ResidualReport isoperimetric_residual(const VariationalProblem& problem, const Trajectory& x,
                                      double lambda, const ResidualOptions& options)
{
    check_trajectory(problem, x);
    const auto* iso = std::get_if<IsoperimetricConstraint>(&problem.constraint);
    if (!iso)
        throw std::invalid_argument("isoperimetric_residual: problem has no integral constraint");
    if (!std::isfinite(lambda))
        throw std::invalid_argument("isoperimetric_residual: multiplier must be finite");
    const Lagrangian F = problem.lagrangian.plus(lambda, iso->integrand);
    ResidualReport report = first_order_residual(problem, F, x, options);
    report.multiplier = lambda;
    report.abnormal_residual =
        first_order_residual(problem, iso->integrand, x, options).sup_norm_interior;
    return report;
}

ResidualReport holonomic_residual(const VariationalProblem& problem, const Trajectory& x,
                                  const ResidualOptions& options)
{
    check_trajectory(problem, x);
    const auto* hol = std::get_if<HolonomicConstraint>(&problem.constraint);
    if (!hol)
        throw std::invalid_argument("holonomic_residual: problem has no pointwise constraint");
    const Grid& g = x.grid;
    const std::vector<SampledSignal> d = left_derivatives(problem, x, {}, options);
    const Lagrangian& L = problem.lagrangian;

    const SampledSignal p2 = partial_along(L, 2, x, d);
    const SampledSignal p3 = partial_along(L, 3, x, d);
    const SampledSignal c4 = caputo_right(partial_along(L, 4, x, d), problem.orders[0]);
    const SampledSignal c5 = caputo_right(partial_along(L, 5, x, d), problem.orders[1]);

    std::vector<double> g2(g.size()), g3(g.size()), lambda(g.size()), r1(g.size()), r2(g.size());
    double violation = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double args[] = {g.node(j), x[0][j], x[1][j]};
        violation = std::max(violation, std::abs(hol->g(args)));
        g2[j] = partial(hol->g, 2, args);
        g3[j] = partial(hol->g, 3, args);
        if (std::abs(g3[j]) < 1e-10)
            throw HypothesisError("holonomic_residual: dg/dx2 vanishes at t = " +
                                  std::to_string(g.node(j)));
        lambda[j] = -(p3[j] + c5[j]) / g3[j];
        r1[j] = p2[j] + c4[j] + lambda[j] * g2[j];
        r2[j] = p3[j] + c5[j] + lambda[j] * g3[j];
    }

    ResidualReport report;
    for (auto* v : {&r1, &r2}) {
        SampledSignal s(g, std::move(*v));
        s.flagged = g.n();
        report.el_residual.push_back(std::move(s));
    }
    report.unconstrained_parts.push_back(add(p2, c4));
    report.unconstrained_parts.push_back(add(p3, c5));
    SampledSignal lam(g, std::move(lambda));
    lam.flagged = g.n();
    report.multiplier_profile = std::move(lam);
    report.constraint_violation = violation;

    const Band band = interior_band(g, options.band_fraction);
    report.band_lo = band.lo;
    report.band_hi = band.hi;
    report.sup_norm_interior = sup_over(report.el_residual, band);
    return report;
}

ResidualReport higher_order_residual(const VariationalProblem& problem, const Trajectory& x,
                                     std::span<const double> initial_derivs,
                                     const ResidualOptions& options)
{
    check_trajectory(problem, x);
    if (problem.layout == Layout::two_component)
        throw std::invalid_argument("higher_order_residual: single-component problems only");
    const std::size_t m = problem.orders.size();
    if (m > 3)
        throw std::invalid_argument("higher_order_residual: at most three orders");
    const Grid& g = x.grid;
    const Lagrangian& L = problem.lagrangian;
    const std::vector<SampledSignal> d = left_derivatives(problem, x, initial_derivs, options);

    SampledSignal r = partial_along(L, 2, x, d);
    for (std::size_t i = 0; i < m; ++i) {
        const FracOrder alpha = problem.orders[i];
        const SampledSignal p = partial_along(L, i + 3, x, d);
        const int k = alpha.band() - 1;
        SampledSignal term = rl_right_derivative(p, FracOrder(alpha.fractional_part()));
        if (k > 0) {
            term = finite_difference(term, k);
            if (k % 2 == 1)
                for (double& v : term.values)
                    v = -v;
        }
        for (std::size_t j = 0; j < g.size(); ++j)
            r.values[j] += term[j];
    }
    r.flagged = g.n();

    ResidualReport report;
    report.el_residual.push_back(std::move(r));
    const Band band = interior_band(g, options.band_fraction);
    report.band_lo = band.lo;
    report.band_hi = band.hi;
    report.sup_norm_interior = sup_over(report.el_residual, band);
    if (m == 1)
        report.legendre_min = legendre_min(L, x, d);
    return report;
}

double legendre_check(const VariationalProblem& problem, const Trajectory& x)
{
    check_trajectory(problem, x);
    if (problem.layout != Layout::scalar)
        throw std::invalid_argument("legendre_check: scalar problems only");
    const std::vector<SampledSignal> d = left_derivatives(problem, x, {}, {});
    return legendre_min(problem.lagrangian, x, d);
}

ConvexityResult convexity_check(const VariationalProblem& problem, int samples,
                                const ConvexityOptions& options)
{
    problem.validate();
    if (problem.layout != Layout::scalar)
        throw std::invalid_argument("convexity_check: scalar problems only");
    if (samples < 1)
        throw std::invalid_argument("convexity_check: need at least one sample");
    const Lagrangian& L = problem.lagrangian;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> time(problem.a, problem.b);
    std::uniform_real_distribution<double> box(-options.half_width, options.half_width);

    ConvexityResult result;
    result.pass = true;
    result.worst_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const double t = time(rng), x = box(rng), y = box(rng), v = box(rng), w = box(rng);
        const double base[] = {t, x, y};
        const double shifted[] = {t, x + v, y + w};
        const double l0 = L(base);
        const double l1 = L(shifted);
        const double margin = l1 - l0 - partial(L, 2, base) * v - partial(L, 3, base) * w;
        if (margin < result.worst_margin) {
            result.worst_margin = margin;
            result.worst_point = {t, x, y, v, w};
        }
        if (margin < -options.tolerance * (1.0 + std::abs(l0) + std::abs(l1)))
            result.pass = false;
    }
    return result;
}

Verdict classify(const ResidualReport& report, double tolerance,
                 const std::optional<ConvexityResult>& convexity)
{
    if (!(report.sup_norm_interior <= tolerance))
        return Verdict::not_extremal;
    if (convexity && convexity->pass)
        return Verdict::global_minimizer_sampled;
    return Verdict::candidate;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::not_extremal:
        return "not an extremal";
    case Verdict::candidate:
        return "candidate";
    case Verdict::global_minimizer_sampled:
        return "global minimizer (sampled-convexity evidence)";
    }
    return "?";
}

} // namespace fracvar
