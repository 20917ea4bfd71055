#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

/// Uniform grid r_k = k h, k = 0..M, on [0, R] for radial functions on R^n.
///
/// Node k carries the measure of its dual cell [r_k - h/2, r_k + h/2] clipped
/// to [0, R], so the node weights sum to the ball volume exactly. The flux
/// weights live on the midpoints r_{k+1/2} and integrate |u'|^2; together the
/// two sets define a Laplacian that is the exact variational derivative of
/// the discrete Dirichlet energy.
class RadialGrid {
 public:
  RadialGrid(int dim, double radius, std::size_t cells);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  std::size_t cells() const { return cells_; }
  std::size_t size() const { return cells_ + 1; }
  double h() const { return h_; }
  double r(std::size_t k) const { return static_cast<double>(k) * h_; }

  std::span<const double> weights() const { return weights_; }
  /// omega_{n-1} r_{k+1/2}^{n-1} h for k = 0..M-1.
  std::span<const double> flux_weights() const { return flux_; }

  double ball_volume() const;
  double max_weight() const;

  /// Surface area of the unit sphere in R^n (2 for n = 1).
  static double sphere_area(int dim);

  bool operator==(const RadialGrid& other) const {
    return dim_ == other.dim_ && radius_ == other.radius_ &&
           cells_ == other.cells_;
  }

 private:
  int dim_;
  double radius_;
  std::size_t cells_;
  double h_;
  std::vector<double> weights_;
  std::vector<double> flux_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(int dim, double radius, std::size_t cells) {
  return std::make_shared<const RadialGrid>(dim, radius, cells);
}

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Samples u(r_k) of one radial profile. The value at r_M is pinned to 0.
class RadialField {
 public:
  RadialField() = default;
  explicit RadialField(GridPtr grid);
  RadialField(GridPtr grid, std::vector<double> values);

  template <class F>
  static RadialField sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k] = f(grid->r(k));
    v.back() = 0.0;
    return RadialField(std::move(grid), std::move(v));
  }

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  bool is_zero() const;
  double max_abs() const;

  RadialField& operator*=(double t);
  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);
  /// this += a * x
  RadialField& axpy(double a, const RadialField& x);

  friend RadialField operator*(double t, RadialField u) { return u *= t; }
  friend RadialField operator+(RadialField u, const RadialField& v) {
    return u += v;
  }
  friend RadialField operator-(RadialField u, const RadialField& v) {
    return u -= v;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const RadialField& u, const RadialField& v);

/// Radial Laplacian u'' + (n-1)/r u', conservative three-point form.
/// At r = 0 this reduces to 2n (u_1 - u_0)/h^2; the value at r_M is 0.
RadialField laplacian(const RadialField& u);

/// Forward differences (u_{k+1} - u_k)/h at the midpoints, k = 0..M-1.
std::vector<double> midpoint_gradient(const RadialField& u);

/// |grad u|_2^2 with the flux weights.
double gradient_sq_integral(const RadialField& u);

/// int |grad u|^2 + lambda u^2.
double norm_lambda_sq(const RadialField& u, double lambda);

/// (sum_k w_k |u_k|^p)^{1/p}
double lp_norm(const RadialField& u, double p);

/// sum_k w_k |u_k|^p without the root.
double lp_integral(const RadialField& u, double p);

/// |u v|_q^q
double mixed_term(const RadialField& u, const RadialField& v, double q);

/// sum_k w_k u_k v_k
double inner(const RadialField& u, const RadialField& v);

/// Solves (-Laplacian + lambda) s = g with s(r_M) = 0 (Thomas algorithm on
/// the weight-symmetrized tridiagonal system).
RadialField solve_shifted_laplacian(const RadialField& g, double lambda);

/// CSV with header "r,u1,...,ud", one row per node, 17 significant digits.
void write_fields_csv(std::ostream& os, std::span<const RadialField> fields);

}  // namespace nehari
