#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/radial.hpp"

namespace nehari {

struct SolverConfig {
  int max_iter = 4000;
  double tol_residual = 1e-8;
  double step0 = 1.0;
  double step_max = 1.0;
  double armijo_factor = 0.5;
  double armijo_c = 1e-4;
  int symmetrize_every = 10;
  int multistart = 4;
  std::uint64_t seed = 1;
  /// Relative mass below which a component is a candidate null component.
  double tol_null = 1e-6;
  /// A small component counts as null only while its own Nehari balance
  /// (nonlinear / quadratic) stays below 1 - tol_balance.
  double tol_balance = 1e-3;
  int workers = 1;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, Stalled };
std::string to_string(SolveStatus s);

struct Classification {
  enum class Kind { Nontrivial, Semitrivial, Zero };
  Kind kind = Kind::Zero;
  std::vector<std::size_t> null_components;  ///< 0-based

  std::string label() const;  ///< "nontrivial", "semitrivial(2)", "zero"
  bool nontrivial() const { return kind == Kind::Nontrivial; }
};

struct TraceEntry {
  double energy;
  double residual;
};

struct SolveReport {
  FieldVector minimizer;
  EnergyBreakdown energy;
  double level = 0.0;
  double residual = 0.0;
  std::vector<double> component_mass;     ///< |u_i|_{2q}
  std::vector<double> component_balance;  ///< nonlinear_i / quadratic_i
  Classification classification;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  std::size_t start_index = 0;
  std::vector<TraceEntry> trace;
  /// Original component indices (0-based) when this is a subsystem solve.
  std::vector<std::size_t> components;
  /// Distinct minimizers found at the same level (within 1e-8 relative).
  std::vector<FieldVector> alternates;
  double boundary_value = 0.0;  ///< max_i |u_i(r_{M-1})|

  bool converged() const { return status == SolveStatus::Converged; }
  bool positive_at_origin() const;
};

/// Default grid radius 20 / sqrt(min lambda_i).
double default_radius(const Params& p);

/// Gaussian exp(-lambda r^2) scaled to unit L^{2q} norm.
RadialField gaussian_profile(const GridPtr& grid, double lambda, double q);

/// Descent from one initial field (no multistart).
SolveReport descend(const Params& p, FieldVector init, const SolverConfig& cfg,
                    std::size_t start_index = 0);

/// Multistart ground-state search: default Gaussian start, one semitrivial
/// candidate per component (scalar ground state, others 1e-8), and
/// cfg.multistart random amplitude perturbations. Returns the lowest level.
SolveReport solve(const Params& p, const GridPtr& grid, const SolverConfig& cfg,
                  const std::optional<FieldVector>& init = std::nullopt);

/// Level c_i of the scalar equation for component i.
double scalar_level(const Params& p, std::size_t i, const GridPtr& grid, const SolverConfig& cfg);
SolveReport scalar_solve(const Params& p, std::size_t i, const GridPtr& grid,
                         const SolverConfig& cfg);

/// Ground state of the system restricted to the listed (0-based) components.
SolveReport subsystem_solve(const Params& p, const std::vector<std::size_t>& indices,
                            const GridPtr& grid, const SolverConfig& cfg);

/// Classification by relative mass and component Nehari balance.
Classification classify(const std::vector<double>& mass, const std::vector<double>& balance,
                        double tol_null, double tol_balance);

}  // namespace nehari
