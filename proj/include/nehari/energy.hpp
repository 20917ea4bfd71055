#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/radial.hpp"

namespace nehari {

class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem data for
///   -Delta u_i + lambda_i u_i = mu_i |u_i|^{2q-2} u_i
///                               + sum_{j != i} b_ij |u_j|^q |u_i|^{q-2} u_i
/// on R^n, i = 1..d.
struct Params {
  int n = 1;
  double q = 2.0;
  std::vector<double> lambda;
  std::vector<double> mu;
  /// Row-major d x d, symmetric; diagonal unused.
  std::vector<double> b;

  std::size_t d() const { return lambda.size(); }
  double coupling(std::size_t i, std::size_t j) const { return b[i * d() + j]; }
  void set_coupling(std::size_t i, std::size_t j, double value);

  /// Throws AdmissibilityError naming the violated constraint.
  void validate() const;

  /// Same coupling value for every pair.
  static Params uniform(int n, double q, std::vector<double> lambda,
                        std::vector<double> mu, double b);

  /// Restriction to the listed components (in the given order).
  Params restrict_to(std::span<const std::size_t> indices) const;
};

/// Upper exponent bound q < n/(n-2) for n >= 3 (infinity otherwise).
double critical_exponent(int n);

/// d radial profiles on one grid.
struct FieldVector {
  std::vector<RadialField> components;

  FieldVector() = default;
  explicit FieldVector(std::vector<RadialField> comps);
  FieldVector(GridPtr grid, std::size_t d);

  std::size_t d() const { return components.size(); }
  const RadialGrid& grid() const { return components.front().grid(); }
  const GridPtr& grid_ptr() const { return components.front().grid_ptr(); }
  RadialField& operator[](std::size_t i) { return components[i]; }
  const RadialField& operator[](std::size_t i) const { return components[i]; }

  bool is_zero() const;
  FieldVector& operator*=(double t);
  FieldVector& axpy(double a, const FieldVector& x);
  friend FieldVector operator*(double t, FieldVector u) { return u *= t; }
};

struct EnergyBreakdown {
  double quadratic = 0.0;  ///< sum_i ||u_i||^2_{lambda_i}
  double self = 0.0;       ///< sum_i mu_i |u_i|_{2q}^{2q}
  double coupling = 0.0;   ///< 2 sum_{i<j} b_ij |u_i u_j|_q^q
  double I = 0.0;
  double tau = 0.0;

  double nonlinear() const { return self + coupling; }
};

/// Per-component pieces of the energy.
struct ComponentTerms {
  std::vector<double> quadratic;  ///< ||u_i||^2_{lambda_i}
  std::vector<double> self;       ///< mu_i |u_i|_{2q}^{2q}
  std::vector<double> pair;       ///< |u_i u_j|_q^q, row-major d x d, zero diagonal
};

EnergyBreakdown evaluate(const Params& p, const FieldVector& u);
ComponentTerms component_terms(const Params& p, const FieldVector& u);

/// PDE residual -Delta u_i + lambda_i u_i - (nonlinear terms), i.e. the
/// gradient of I_d with respect to the quadrature inner product.
FieldVector gradient(const Params& p, const FieldVector& u);

/// Quadrature L2 norm of a field vector.
double l2_norm(const FieldVector& u);
/// sum_i <u_i, v_i>
double inner(const FieldVector& u, const FieldVector& v);

class ProjectionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Projection {
  double t = 1.0;
  FieldVector field;
};

/// Scales u onto the Nehari manifold: t^{2q-2} = quadratic / (self + coupling).
Projection nehari_project(const Params& p, const FieldVector& u);

/// Energy of the projection, (1/2 - 1/(2q)) Q^{q/(q-1)} / N^{1/(q-1)},
/// without forming the scaled field. Infinite when N = 0.
double projected_energy(const Params& p, const EnergyBreakdown& e);

}  // namespace nehari
