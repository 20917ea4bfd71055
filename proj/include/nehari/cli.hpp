#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nehari/energy.hpp"
#include "nehari/minimize.hpp"

namespace nehari {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNotConverged = 2,
  kExitBracket = 3,
  kExitAudit = 4,
};

/// Subcommands: solve, scalar, subsystems, theta-search, threshold, audit.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Writes to "<path>.tmp" and renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// key = value block describing one solve.
std::string format_report(const SolveReport& r);

}  // namespace nehari
