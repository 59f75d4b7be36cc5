#pragma once

#include <iosfwd>
#include <vector>

#include "labandit/cli/run_config.hpp"

namespace labandit::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

/// Executes a validated config. Results go to cfg.output, or `out` when no
/// output path is set; diagnostics go to `err`. Returns an exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (including argv[0]) and runs it. BANDIT_SEED, when set,
/// overrides --seed.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Expands "a..b" (doubling from a up to b) or "n1,n2,..." into a grid.
std::vector<std::size_t> parse_n_grid(const std::string& text);

/// Least-squares slope of log|y| on log x over points with y != 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace labandit::cli
