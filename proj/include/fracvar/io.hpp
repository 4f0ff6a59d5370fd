#pragma once

#include "fracvar/direct.hpp"
#include "fracvar/problem.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fracvar {

/// Problem or solution file rejected; the message names file, section and key.
class FileFormatError : public std::runtime_error {
public:
    explicit FileFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverSettings {
    std::optional<std::size_t> n;
    std::optional<double> tol;
    std::optional<int> max_iter;
};

struct ProblemSpec {
    VariationalProblem problem;
    SolverSettings solver;
};

/**
 * Sectioned key-value problem format:
 *
 *   [problem]
 *   a = 0
 *   b = 1
 *   alpha = 0.5            # or alpha1 / alpha2 for two components
 *   lagrangian = "d^2"
 *   x_a = 0                # real, or free; comma-separated per component
 *   x_b = free
 *   [constraint]           # optional
 *   kind = isoperimetric   # integrand, level   | holonomic: g
 *   [solver]               # optional
 *   n = 100
 *   tol = 1e-9
 *   max_iter = 200
 *
 * Lines starting with '#' or ';' are comments.
 */
ProblemSpec parse_problem_text(std::string_view text, std::string_view origin);
ProblemSpec read_problem_file(const std::filesystem::path& path);

/// CSV with header "t,x" (or "t,x1,x2"), one row per node, 12 significant
/// digits. A diagnostics string, if given, goes on a trailing '#' line.
void write_solution(std::ostream& out, const Trajectory& x,
                    const std::optional<std::string>& diagnostics = std::nullopt);

/// Reads a solution CSV; the grid is rebuilt from the t column, which must be
/// uniform. Comment lines are skipped.
Trajectory read_solution(std::istream& in, std::string_view origin);

/// %.12g, with ".0" appended when the result would look like an integer.
std::string format_real(double v);

} // namespace fracvar
