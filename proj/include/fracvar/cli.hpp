#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace fracvar::cli {

/// Exit codes shared by all subcommands.
enum ExitCode : int { ok = 0, usage_error = 1, not_converged = 2 };

/**
 * Entry point behind the `fracvar` executable. `args` excludes the program
 * name. Data (CSV rows, tables, reports) goes to `out`; diagnostics to `err`.
 *
 *   fracvar solve       --problem <file|builtin> --n N --out s.csv [--tol T] [--max-iter K]
 *   fracvar convergence --problem ... --n-list 10,50,100 [--reference analytic:<expr>|finest] [--out t.csv]
 *   fracvar residual    --problem ... --solution s.csv [--n N] [--legendre] [--convexity S] [--lambda L]
 */
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace fracvar::cli
