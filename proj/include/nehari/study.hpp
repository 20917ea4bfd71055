#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/minimize.hpp"
#include "nehari/radial.hpp"

namespace nehari {

/// The test field (t u_1, ..., t u_{d-1}, t theta w) built from a ground
/// state of a (d-1)-component subsystem plus one new profile w.
struct TestConstruction {
  double theta = 0.0;
  double t = 0.0;
  double log_t = 0.0;  ///< kept separately: t rounds to 1 when theta is tiny
  double C1 = 0.0;  ///< ||w||^2_{lambda_k} / sum ||u_i||^2_{lambda_i}
  double C2 = 0.0;  ///< |w|_{2q}^{2q} / sum ||u_i||^2_{lambda_i}
  std::vector<double> D;  ///< |u_i w|_q^q / sum ||u_i||^2_{lambda_i}, base order
  double lhs = 0.0;  ///< ((1 + theta^2 C1)^q - 1 - mu_k theta^{2q} C2) / theta^q
  double rhs = 0.0;  ///< 2 sum_i b_ik D_i
  double energy_new = 0.0;   ///< I_d of the assembled field
  double energy_base = 0.0;  ///< level of the base subsystem
  /// energy_base - energy_new evaluated in difference form (no cancellation
  /// against the base level), so tiny gains remain resolvable.
  double energy_gain = 0.0;
  double identity_residual = 0.0;  ///< |t^{2q-2} den - (1 + theta^2 C1)| / (1 + theta^2 C1)
  double tau_relative = 0.0;       ///< |tau(assembled)| / quadratic(assembled)
  std::size_t omitted = 0;         ///< index of the new component (0-based)
  FieldVector field;

  bool passes() const { return lhs < rhs; }
  bool undercuts() const { return energy_gain > 0.0; }
  /// 1 - t^2 (1 + C1 theta^2)
  double contraction_margin() const;
  /// lhs < rhs, t^2(1 + C1 theta^2) < 1 and energy_new < energy_base agree,
  /// and the two energy-ratio routes match to 1e-8 relative.
  bool chain_consistent() const;
};

/// ((1 + theta^2 c1)^q - 1 - mu theta^{2q} c2) / theta^q, cancellation-free.
double condition_lhs(double q, double theta, double c1, double c2, double mu);

class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds and checks the test field for one theta. `base` must be a
/// nontrivial ground state of the subsystem omitting exactly one component.
TestConstruction test_function_check(const Params& p, const SolveReport& base,
                                     const RadialField& w, double theta);

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> default_theta_grid();

struct ThetaSearchResult {
  std::optional<TestConstruction> best;
  std::vector<TestConstruction> evaluated;
};

/// Scans theta and keeps the passing construction with the largest energy
/// gain (lowest energy_new).
ThetaSearchResult theta_search(const Params& p, const SolveReport& base, const RadialField& w,
                               const std::vector<double>& theta_grid = default_theta_grid());

struct InductionReport {
  std::vector<SolveReport> subsystems;  ///< subsystems[k] omits component k
  std::size_t argmin = 0;
  double base_level = 0.0;
  ThetaSearchResult theta;
  SolveReport full;
  bool construction_undercuts = false;  ///< energy_new < min subsystem level
  bool full_below_construction = false; ///< full level <= energy_new
  bool full_nontrivial = false;

  bool passed() const {
    return construction_undercuts && full_below_construction && full_nontrivial;
  }
};

class SubsystemFailure : public std::runtime_error {
 public:
  SubsystemFailure(const std::string& what, std::vector<std::size_t> subset)
      : std::runtime_error(what), subset(std::move(subset)) {}
  std::vector<std::size_t> subset;
};

/// Induction step: all size-(d-1) subsystems, construction on top of the
/// lowest one with w = scalar ground state of the omitted equation, then the
/// full system.
InductionReport induction_audit(const Params& p, const GridPtr& grid, const SolverConfig& cfg,
                                const std::vector<double>& theta_grid = default_theta_grid());

struct ScanRow {
  double b = 0.0;
  double level = 0.0;
  Classification classification;
  std::vector<double> masses;
  bool converged = false;
};

ScanRow scan_point(const Params& tmpl, double b, const GridPtr& grid, const SolverConfig& cfg);

/// One solve per coupling value (d = 2).
std::vector<ScanRow> coupling_scan(const Params& tmpl, const std::vector<double>& b_values,
                                   const GridPtr& grid, const SolverConfig& cfg);

struct ThresholdResult {
  double b_lo = 0.0;  ///< semitrivial
  double b_hi = 0.0;  ///< nontrivial
  std::vector<ScanRow> trace;
};

class BracketError : public std::invalid_argument {
 public:
  BracketError(const std::string& what, ScanRow lo, ScanRow hi)
      : std::invalid_argument(what), lo(std::move(lo)), hi(std::move(hi)) {}
  ScanRow lo;
  ScanRow hi;
};

/// Bisection on the ground-state classification in b for d = 2.
ThresholdResult threshold_scan(const Params& tmpl, const GridPtr& grid, const SolverConfig& cfg,
                               double b_lo, double b_hi, double width = 1e-2);

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);
void write_theta_csv(std::ostream& os, const std::vector<TestConstruction>& rows);

}  // namespace nehari
