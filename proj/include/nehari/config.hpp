#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/minimize.hpp"
#include "nehari/symmetrize.hpp"

namespace nehari {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogRange {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

/// Everything one CLI run needs. File format: INI-style sections with
/// `key = value` lines, `#` comments, comma-separated lists; the first
/// non-comment line must be `schema_version = 1`.
struct RunConfig {
  int schema_version = 1;
  Params problem;
  double radius = 0.0;  ///< 0 selects 20 / sqrt(min lambda)
  std::size_t cells = 2000;
  SolverConfig solver;
  LogRange theta{1e-4, 10.0, 61};
  std::optional<double> bracket_lo;
  std::optional<double> bracket_hi;
  double bracket_width = 1e-2;
  std::optional<LogRange> coupling_grid;
  std::size_t audit_samples = 100;
  bool audit_corrupt = false;
  bool audit_induction = true;
  AuditTolerance audit_tolerance;
  std::string output_dir = ".";
  std::string output_prefix = "run";

  GridPtr make_grid() const;
};

/// Parses a config; `overrides` are "section.key=value" strings applied on
/// top of the file. Errors carry "<source>:<line>:" anchors.
RunConfig parse_config(std::istream& in, const std::string& source,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace nehari
