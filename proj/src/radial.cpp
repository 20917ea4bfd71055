#include "nehari/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace nehari {

namespace {

double shell_volume(int dim, double r) {
  return RadialGrid::sphere_area(dim) * std::pow(r, dim) / dim;
}

}  // namespace

RadialGrid::RadialGrid(int dim, double radius, std::size_t cells)
    : dim_(dim), radius_(radius), cells_(cells) {
  if (dim < 1) throw std::invalid_argument("RadialGrid: dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("RadialGrid: radius must be positive");
  if (cells < 8) throw std::invalid_argument("RadialGrid: need at least 8 cells");

  h_ = radius / static_cast<double>(cells);
  const double omega = sphere_area(dim);

  weights_.resize(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    const double lo = std::max(r(k) - 0.5 * h_, 0.0);
    const double hi = std::min(r(k) + 0.5 * h_, radius);
    weights_[k] = shell_volume(dim, hi) - shell_volume(dim, lo);
  }

  flux_.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double mid = r(k) + 0.5 * h_;
    flux_[k] = omega * std::pow(mid, dim - 1) * h_;
  }
}

double RadialGrid::sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double RadialGrid::ball_volume() const { return shell_volume(dim_, radius_); }

double RadialGrid::max_weight() const {
  return *std::max_element(weights_.begin(), weights_.end());
}

RadialField::RadialField(GridPtr grid)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("RadialField: null grid");
  if (values_.size() != grid_->size())
    throw std::invalid_argument("RadialField: sample count does not match grid");
  if (values_.back() != 0.0)
    throw std::invalid_argument("RadialField: value at r = R must be 0");
}

bool RadialField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return x == 0.0; });
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

RadialField& RadialField::operator*=(double t) {
  for (double& x : values_) x *= t;
  return *this;
}

RadialField& RadialField::operator+=(const RadialField& other) {
  return axpy(1.0, other);
}

RadialField& RadialField::operator-=(const RadialField& other) {
  return axpy(-1.0, other);
}

RadialField& RadialField::axpy(double a, const RadialField& x) {
  require_same_grid(*this, x);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

void require_same_grid(const RadialField& u, const RadialField& v) {
  if (u.grid_ptr() == v.grid_ptr()) return;
  if (!u.grid_ptr() || !v.grid_ptr() || !(u.grid() == v.grid()))
    throw GridMismatch("fields live on different grids");
}

RadialField laplacian(const RadialField& u) {
  const RadialGrid& g = u.grid();
  const auto w = g.weights();
  const auto a = g.flux_weights();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const std::size_t m = g.cells();

  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double right = a[k] * (u[k + 1] - u[k]);
    const double left = k == 0 ? 0.0 : a[k - 1] * (u[k] - u[k - 1]);
    out[k] = (right - left) * inv_h2 / w[k];
  }
  return RadialField(u.grid_ptr(), std::move(out));
}

std::vector<double> midpoint_gradient(const RadialField& u) {
  const RadialGrid& g = u.grid();
  std::vector<double> d(g.cells());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (u[k + 1] - u[k]) / g.h();
  return d;
}

double gradient_sq_integral(const RadialField& u) {
  const RadialGrid& g = u.grid();
  const auto a = g.flux_weights();
  const double h = g.h();
  double s = 0.0;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const double d = (u[k + 1] - u[k]) / h;
    s += a[k] * d * d;
  }
  return s;
}

double norm_lambda_sq(const RadialField& u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("norm_lambda_sq: lambda must be > 0");
  return gradient_sq_integral(u) + lambda * lp_integral(u, 2.0);
}

double lp_integral(const RadialField& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto w = u.grid().weights();
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * u[k] * u[k];
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (u[k] != 0.0) s += w[k] * std::pow(std::abs(u[k]), p);
    }
  }
  return s;
}

double lp_norm(const RadialField& u, double p) {
  return std::pow(lp_integral(u, p), 1.0 / p);
}

double mixed_term(const RadialField& u, const RadialField& v, double q) {
  require_same_grid(u, v);
  const auto w = u.grid().weights();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double prod = std::abs(u[k] * v[k]);
    if (prod != 0.0) s += w[k] * std::pow(prod, q);
  }
  return s;
}

double inner(const RadialField& u, const RadialField& v) {
  require_same_grid(u, v);
  const auto w = u.grid().weights();
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * u[k] * v[k];
  return s;
}

RadialField solve_shifted_laplacian(const RadialField& g, double lambda) {
  const RadialGrid& grid = g.grid();
  const auto w = grid.weights();
  const auto a = grid.flux_weights();
  const double h2 = grid.h() * grid.h();
  const std::size_t m = grid.cells();  // unknowns 0..m-1

  // Row k: -a_{k-1} s_{k-1} + (a_{k-1} + a_k + lambda w_k h^2) s_k - a_k s_{k+1}
  //        = w_k h^2 g_k
  std::vector<double> c(m), d(m);
  double prev_c = 0.0, prev_d = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double lower = k == 0 ? 0.0 : -a[k - 1];
    const double diag = (k == 0 ? 0.0 : a[k - 1]) + a[k] + lambda * w[k] * h2;
    const double upper = -a[k];
    const double rhs = w[k] * h2 * g[k];
    const double denom = diag - lower * prev_c;
    c[k] = upper / denom;
    d[k] = (rhs - lower * prev_d) / denom;
    prev_c = c[k];
    prev_d = d[k];
  }
  std::vector<double> s(grid.size(), 0.0);
  for (std::size_t k = m; k-- > 0;) s[k] = d[k] - c[k] * s[k + 1];
  return RadialField(g.grid_ptr(), std::move(s));
}

void write_fields_csv(std::ostream& os, std::span<const RadialField> fields) {
  if (fields.empty()) throw std::invalid_argument("write_fields_csv: no fields");
  for (const auto& f : fields.subspan(1)) require_same_grid(fields[0], f);
  const auto old_prec = os.precision(17);
  os << "r";
  for (std::size_t i = 0; i < fields.size(); ++i) os << ",u" << (i + 1);
  os << '\n';
  const RadialGrid& g = fields[0].grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    os << g.r(k);
    for (const auto& f : fields) os << ',' << f[k];
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace nehari
