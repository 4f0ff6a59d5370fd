#include "fracvar/cli.hpp"

#include "fracvar/direct.hpp"
#include "fracvar/indirect.hpp"
#include "fracvar/io.hpp"
#include "fracvar/problem.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fracvar::cli {

namespace {

struct SolveArgs {
    std::string problem;
    std::optional<std::size_t> n;
    std::string out;
    std::optional<double> tol;
    std::optional<int> max_iter;
};

struct ConvergenceArgs {
    std::string problem;
    std::string n_list;
    std::string reference;
    std::string out;
    std::optional<double> tol;
    std::optional<int> max_iter;
};

struct ResidualArgs {
    std::string problem;
    std::string solution;
    std::optional<std::size_t> n;
    bool legendre = false;
    std::optional<int> convexity;
    std::optional<double> lambda;
    double band = 0.05;
    double tol = 1e-6;
};

// Input the user must fix; reported with exit code 1.
struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ProblemSpec load_problem(const std::string& ref)
{
    if (is_builtin(ref))
        return ProblemSpec{builtin(ref), {}};
    return read_problem_file(ref);
}

SolverOptions solver_options(const ProblemSpec& spec, std::optional<double> tol,
                             std::optional<int> max_iter)
{
    SolverOptions opts;
    if (spec.solver.tol)
        opts.tol = *spec.solver.tol;
    if (spec.solver.max_iter)
        opts.max_iter = *spec.solver.max_iter;
    if (tol)
        opts.tol = *tol;
    if (max_iter)
        opts.max_iter = *max_iter;
    return opts;
}

std::vector<std::size_t> parse_n_list(const std::string& text)
{
    std::vector<std::size_t> ns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(' ');
        const auto last = item.find_last_not_of(' ');
        if (first == std::string::npos)
            throw UsageFailure("--n-list: empty entry in '" + text + "'");
        const std::string_view s(item.data() + first, last - first + 1);
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || ptr != s.data() + s.size() || n < 2)
            throw UsageFailure("--n-list: '" + std::string(s) + "' is not an integer >= 2");
        ns.push_back(n);
    }
    if (ns.empty())
        throw UsageFailure("--n-list: no grid sizes given");
    return ns;
}

Reference parse_reference(const std::string& text, const VariationalProblem& problem)
{
    if (text.empty()) {
        if (problem.exact_solution)
            return AnalyticReference{*problem.exact_solution};
        return FinestReference{};
    }
    if (text == "finest")
        return FinestReference{};
    constexpr std::string_view prefix = "analytic:";
    if (text.rfind(prefix, 0) != 0)
        throw UsageFailure("--reference: expected 'analytic:<expr>' or 'finest'");
    Expression e = [&] {
        try {
            return parse(std::string_view(text).substr(prefix.size()));
        } catch (const ParseError& pe) {
            throw UsageFailure(std::string("--reference: expression error ") + pe.what());
        }
    }();
    for (Var v : e.variables())
        if (v != Var::t)
            throw UsageFailure("--reference: expression may only use t");
    return AnalyticReference{std::move(e)};
}

// Second differences carry about eight correct digits.
std::string format_second_difference(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8g", v);
    return format_real(std::stod(buf));
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw UsageFailure("cannot write '" + path + "'");
    f << contents;
    if (!f)
        throw UsageFailure("error writing '" + path + "'");
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err)
{
    const ProblemSpec spec = load_problem(args.problem);
    const std::optional<std::size_t> n = args.n ? args.n : spec.solver.n;
    if (!n)
        throw UsageFailure("--n is required (or give n in the [solver] section)");
    if (*n < 2)
        throw UsageFailure("--n must be at least 2");
    const SolveReport report = solve(spec.problem, *n, solver_options(spec, args.tol, args.max_iter));

    std::optional<std::string> trailer;
    if (!report.converged)
        trailer = "not converged: " + report.diagnostics + "; iterations=" +
                  std::to_string(report.iterations) +
                  "; gradient_norm=" + format_real(report.gradient_norm);
    std::ostringstream csv;
    write_solution(csv, report.trajectory, trailer);
    write_file(args.out, csv.str());

    out << "objective = " << format_real(report.objective_value) << '\n';
    out << "iterations = " << report.iterations << '\n';
    out << "gradient_norm = " << format_real(report.gradient_norm) << '\n';
    out << "converged = " << (report.converged ? "true" : "false") << '\n';
    if (report.multiplier)
        out << "multiplier = " << format_real(*report.multiplier) << '\n';
    if (report.constraint_value)
        out << "constraint_value = " << format_real(*report.constraint_value) << '\n';
    if (report.possibly_abnormal)
        err << "warning: constraint functional is stationary at the solution; "
               "the multiplier rule may be abnormal\n";
    if (!report.converged) {
        err << "solver did not converge: " << report.diagnostics << '\n';
        return not_converged;
    }
    return ok;
}

int cmd_convergence(const ConvergenceArgs& args, std::ostream& out, std::ostream& err)
{
    const std::vector<std::size_t> ns = parse_n_list(args.n_list);
    const ProblemSpec spec = load_problem(args.problem);
    const Reference ref = parse_reference(args.reference, spec.problem);
    if (std::holds_alternative<FinestReference>(ref) &&
        std::all_of(ns.begin(), ns.end(), [&](std::size_t n) { return n == ns.front(); }))
        throw UsageFailure("--reference finest needs at least two different grid sizes");

    const ConvergenceTable table =
        convergence_study(spec.problem, ns, ref, solver_options(spec, args.tol, args.max_iter));

    std::ostringstream csv;
    csv << "n,error,order,status\n";
    out << std::setw(8) << "n" << std::setw(22) << "error" << std::setw(12) << "order" << '\n';
    for (const auto& row : table.rows) {
        out << std::setw(8) << row.n;
        csv << row.n << ',';
        if (row.error) {
            out << std::setw(22) << format_real(*row.error);
            csv << format_real(*row.error);
        } else {
            out << std::setw(22) << "failed";
        }
        csv << ',';
        if (row.order) {
            std::ostringstream o;
            o << std::fixed << std::setprecision(4) << *row.order;
            out << std::setw(12) << o.str();
            csv << format_real(*row.order);
        } else {
            out << std::setw(12) << "-";
        }
        std::string status = row.error ? "ok" : "failed: " + row.failure;
        std::replace(status.begin(), status.end(), ',', ';');
        csv << ',' << status << '\n';
        out << '\n';
        if (!row.error)
            err << "n = " << row.n << ": " << row.failure << '\n';
    }
    if (!args.out.empty())
        write_file(args.out, csv.str());
    if (!table.monotone && !table.any_failed)
        err << "warning: errors are not strictly decreasing\n";
    return table.any_failed ? not_converged : ok;
}

int cmd_residual(const ResidualArgs& args, std::ostream& out, std::ostream& err)
{
    const ProblemSpec spec = load_problem(args.problem);
    const VariationalProblem& problem = spec.problem;
    std::ifstream in(args.solution);
    if (!in)
        throw UsageFailure("cannot open solution file '" + args.solution + "'");
    const Trajectory x = read_solution(in, args.solution);

    const double span = problem.b - problem.a;
    if (std::abs(x.grid.a() - problem.a) > 1e-9 * span || std::abs(x.grid.b() - problem.b) > 1e-9 * span)
        throw UsageFailure("solution grid [" + format_real(x.grid.a()) + ", " +
                           format_real(x.grid.b()) + "] does not match the problem interval");
    if (args.n && x.grid.n() != *args.n)
        throw UsageFailure("solution has " + std::to_string(x.grid.size()) + " rows, --n " +
                           std::to_string(*args.n) + " implies " + std::to_string(*args.n + 1));
    if (x.size() != problem.components())
        throw UsageFailure("solution has " + std::to_string(x.size()) +
                           " component(s), problem expects " + std::to_string(problem.components()));
    // rebuild on the problem's exact endpoints
    std::vector<SampledSignal> comps;
    const Grid grid(problem.a, problem.b, x.grid.n());
    for (const auto& c : x.components)
        comps.emplace_back(grid, c.values);
    const Trajectory traj(std::move(comps));

    ResidualOptions ropts;
    ropts.band_fraction = args.band;
    ResidualReport report;
    if (problem.is_holonomic()) {
        report = holonomic_residual(problem, traj, ropts);
    } else if (problem.is_isoperimetric() && args.lambda) {
        report = isoperimetric_residual(problem, traj, *args.lambda, ropts);
    } else {
        if (problem.is_isoperimetric())
            err << "note: no --lambda given; reporting the residual of L alone\n";
        report = el_residual(problem, traj, ropts);
    }

    out << "sup_norm_interior = " << format_real(report.sup_norm_interior) << '\n';
    out << "interior_band = " << report.band_lo << ".." << report.band_hi << '\n';
    if (report.transversality_left)
        out << "transversality_left = " << format_real(*report.transversality_left) << '\n';
    if (report.transversality_right)
        out << "transversality_right = " << format_real(*report.transversality_right) << '\n';
    if (report.abnormal_residual)
        out << "constraint_residual = " << format_real(*report.abnormal_residual) << '\n';
    if (report.constraint_violation)
        out << "constraint_violation = " << format_real(*report.constraint_violation) << '\n';
    if (args.legendre) {
        if (!report.legendre_min)
            throw UsageFailure("--legendre applies to scalar problems only");
        out << "legendre_min = " << format_second_difference(*report.legendre_min) << '\n';
        if (*report.legendre_min < -1e-6)
            err << "Legendre condition fails: not a minimiser candidate\n";
    }
    std::optional<ConvexityResult> convex;
    if (args.convexity) {
        if (problem.layout != Layout::scalar)
            throw UsageFailure("--convexity applies to scalar problems only");
        convex = convexity_check(problem, *args.convexity);
        out << "convexity = " << (convex->pass ? "pass" : "fail")
            << " (worst margin " << format_real(convex->worst_margin) << ")\n";
    }
    out << "verdict = " << to_string(classify(report, args.tol, convex)) << '\n';
    return ok;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Direct solver and optimality-condition auditor for fractional variational problems",
                 "fracvar"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Minimise the discretised functional");
    solve_cmd->add_option("--problem", sa.problem, "Problem file or built-in name")->required();
    solve_cmd->add_option("--n", sa.n, "Number of subintervals");
    solve_cmd->add_option("--out", sa.out, "Solution CSV path")->required();
    solve_cmd->add_option("--tol", sa.tol, "Stationarity tolerance");
    solve_cmd->add_option("--max-iter", sa.max_iter, "Newton iteration cap");

    ConvergenceArgs ca;
    auto* conv_cmd = app.add_subcommand("convergence", "Error table over several grids");
    conv_cmd->add_option("--problem", ca.problem, "Problem file or built-in name")->required();
    conv_cmd->add_option("--n-list", ca.n_list, "Comma-separated grid sizes")->required();
    conv_cmd->add_option("--reference", ca.reference, "analytic:<expr in t> or finest");
    conv_cmd->add_option("--out", ca.out, "CSV output path");
    conv_cmd->add_option("--tol", ca.tol, "Stationarity tolerance");
    conv_cmd->add_option("--max-iter", ca.max_iter, "Newton iteration cap");

    ResidualArgs ra;
    auto* res_cmd = app.add_subcommand("residual", "Audit a solution against the optimality conditions");
    res_cmd->add_option("--problem", ra.problem, "Problem file or built-in name")->required();
    res_cmd->add_option("--solution", ra.solution, "Solution CSV")->required();
    res_cmd->add_option("--n", ra.n, "Expected number of subintervals");
    res_cmd->add_flag("--legendre", ra.legendre, "Report min of d2L/dd2 along the solution");
    res_cmd->add_option("--convexity", ra.convexity, "Sampled convexity check with this many samples")
        ->check(CLI::PositiveNumber);
    res_cmd->add_option("--lambda", ra.lambda, "Isoperimetric multiplier");
    res_cmd->add_option("--band", ra.band, "Fraction of nodes excluded at each end")
        ->check(CLI::Range(0.0, 0.49));
    res_cmd->add_option("--tol", ra.tol, "Residual level accepted as an extremal");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        CLI::App* sub = nullptr;
        for (CLI::App* s : {solve_cmd, conv_cmd, res_cmd})
            if (s->parsed())
                sub = s;
        err << (sub ? sub->help() : app.help());
        return usage_error;
    }

    try {
        if (solve_cmd->parsed())
            return cmd_solve(sa, out, err);
        if (conv_cmd->parsed())
            return cmd_convergence(ca, out, err);
        return cmd_residual(ra, out, err);
    } catch (const UsageFailure& e) {
        err << "error: " << e.what() << '\n';
        if (solve_cmd->parsed() && !sa.n)
            err << '\n' << solve_cmd->help();
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
}

} // namespace fracvar::cli
