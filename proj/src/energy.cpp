#include "nehari/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nehari {

namespace {

// |u|^{q-1} sign(u), extended by 0 at u = 0.
struct PowerTable {
  std::vector<std::vector<double>> root;  // sign(u)|u|^{q-1}
  std::vector<std::vector<double>> power; // |u|^q
};

PowerTable make_powers(const FieldVector& u, double q) {
  PowerTable t;
  t.root.resize(u.d());
  t.power.resize(u.d());
  for (std::size_t i = 0; i < u.d(); ++i) {
    const auto vals = u[i].values();
    auto& r = t.root[i];
    auto& pw = t.power[i];
    r.assign(vals.size(), 0.0);
    pw.assign(vals.size(), 0.0);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const double x = vals[k];
      if (x == 0.0) continue;
      const double a = std::abs(x);
      const double root = std::pow(a, q - 1.0);
      r[k] = x > 0.0 ? root : -root;
      pw[k] = a * root;
    }
  }
  return t;
}

void check_shape(const Params& p, const FieldVector& u) {
  if (u.d() != p.d()) {
    std::ostringstream msg;
    msg << "field has " << u.d() << " components, params expect " << p.d();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void Params::set_coupling(std::size_t i, std::size_t j, double value) {
  b[i * d() + j] = value;
  b[j * d() + i] = value;
}

double critical_exponent(int n) {
  if (n <= 2) return std::numeric_limits<double>::infinity();
  return static_cast<double>(n) / static_cast<double>(n - 2);
}

void Params::validate() const {
  std::ostringstream msg;
  const std::size_t dd = d();
  if (dd < 1) throw AdmissibilityError("need at least one component (d >= 1)");
  if (n < 1) {
    msg << "dimension n = " << n << " violates n >= 1";
    throw AdmissibilityError(msg.str());
  }
  if (mu.size() != dd) {
    msg << "mu has " << mu.size() << " entries, expected d = " << dd;
    throw AdmissibilityError(msg.str());
  }
  if (b.size() != dd * dd) {
    msg << "coupling matrix has " << b.size() << " entries, expected d*d = " << dd * dd;
    throw AdmissibilityError(msg.str());
  }
  if (!(q > 1.0)) {
    msg << "q = " << q << " violates q > 1";
    throw AdmissibilityError(msg.str());
  }
  const double qmax = critical_exponent(n);
  if (!(q < qmax)) {
    msg << "q = " << q << " violates q < n/(n-2) = " << qmax << " for n = " << n;
    throw AdmissibilityError(msg.str());
  }
  for (std::size_t i = 0; i < dd; ++i) {
    if (!(lambda[i] > 0.0)) {
      msg << "lambda_" << i + 1 << " = " << lambda[i] << " violates lambda_i > 0";
      throw AdmissibilityError(msg.str());
    }
    if (!(mu[i] > 0.0)) {
      msg << "mu_" << i + 1 << " = " << mu[i] << " violates mu_i > 0";
      throw AdmissibilityError(msg.str());
    }
    for (std::size_t j = 0; j < dd; ++j) {
      if (i == j) continue;
      if (!(coupling(i, j) > 0.0)) {
        msg << "b_" << i + 1 << j + 1 << " = " << coupling(i, j) << " violates b_ij > 0";
        throw AdmissibilityError(msg.str());
      }
      if (coupling(i, j) != coupling(j, i)) {
        msg << "b_" << i + 1 << j + 1 << " != b_" << j + 1 << i + 1
            << " violates symmetry b_ij = b_ji";
        throw AdmissibilityError(msg.str());
      }
    }
  }
}

Params Params::uniform(int n, double q, std::vector<double> lambda,
                       std::vector<double> mu, double b) {
  Params p;
  p.n = n;
  p.q = q;
  p.lambda = std::move(lambda);
  p.mu = std::move(mu);
  const std::size_t dd = p.lambda.size();
  p.b.assign(dd * dd, b);
  for (std::size_t i = 0; i < dd; ++i) p.b[i * dd + i] = 0.0;
  return p;
}

Params Params::restrict_to(std::span<const std::size_t> indices) const {
  Params p;
  p.n = n;
  p.q = q;
  const std::size_t m = indices.size();
  p.b.assign(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    if (indices[a] >= d()) throw std::out_of_range("restrict_to: index out of range");
    p.lambda.push_back(lambda[indices[a]]);
    p.mu.push_back(mu[indices[a]]);
    for (std::size_t c = 0; c < m; ++c) {
      if (a != c) p.b[a * m + c] = coupling(indices[a], indices[c]);
    }
  }
  return p;
}

FieldVector::FieldVector(std::vector<RadialField> comps) : components(std::move(comps)) {
  if (components.empty()) throw std::invalid_argument("FieldVector: no components");
  for (const auto& c : components) require_same_grid(components.front(), c);
}

FieldVector::FieldVector(GridPtr grid, std::size_t d) {
  components.reserve(d);
  for (std::size_t i = 0; i < d; ++i) components.emplace_back(grid);
}

bool FieldVector::is_zero() const {
  for (const auto& c : components)
    if (!c.is_zero()) return false;
  return true;
}

FieldVector& FieldVector::operator*=(double t) {
  for (auto& c : components) c *= t;
  return *this;
}

FieldVector& FieldVector::axpy(double a, const FieldVector& x) {
  if (x.d() != d()) throw std::invalid_argument("FieldVector::axpy: component count mismatch");
  for (std::size_t i = 0; i < d(); ++i) components[i].axpy(a, x[i]);
  return *this;
}

ComponentTerms component_terms(const Params& p, const FieldVector& u) {
  check_shape(p, u);
  const std::size_t d = u.d();
  const auto w = u.grid().weights();
  const auto pw = make_powers(u, p.q);

  ComponentTerms t;
  t.quadratic.resize(d);
  t.self.resize(d);
  t.pair.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    t.quadratic[i] = norm_lambda_sq(u[i], p.lambda[i]);
    double s = 0.0;
    const auto& P = pw.power[i];
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * P[k] * P[k];
    t.self[i] = p.mu[i] * s;
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto& Q = pw.power[j];
      double m = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) m += w[k] * P[k] * Q[k];
      t.pair[i * d + j] = m;
      t.pair[j * d + i] = m;
    }
  }
  return t;
}

EnergyBreakdown evaluate(const Params& p, const FieldVector& u) {
  const ComponentTerms t = component_terms(p, u);
  const std::size_t d = u.d();
  EnergyBreakdown e;
  for (std::size_t i = 0; i < d; ++i) {
    e.quadratic += t.quadratic[i];
    e.self += t.self[i];
    for (std::size_t j = i + 1; j < d; ++j) e.coupling += 2.0 * p.coupling(i, j) * t.pair[i * d + j];
  }
  const double nl = e.self + e.coupling;
  e.I = 0.5 * e.quadratic - nl / (2.0 * p.q);
  e.tau = e.quadratic - nl;
  return e;
}

FieldVector gradient(const Params& p, const FieldVector& u) {
  check_shape(p, u);
  const std::size_t d = u.d();
  const auto pw = make_powers(u, p.q);
  FieldVector g;
  g.components.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    RadialField gi = laplacian(u[i]);
    gi *= -1.0;
    gi.axpy(p.lambda[i], u[i]);
    auto vals = gi.values();
    const auto& R = pw.root[i];
    const auto& Pi = pw.power[i];
    const std::size_t m = u.grid().cells();
    for (std::size_t k = 0; k < m; ++k) {
      if (R[k] == 0.0) continue;
      double drive = p.mu[i] * Pi[k];
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) drive += p.coupling(i, j) * pw.power[j][k];
      }
      vals[k] -= drive * R[k];
    }
    g.components.push_back(std::move(gi));
  }
  return g;
}

double inner(const FieldVector& u, const FieldVector& v) {
  if (u.d() != v.d()) throw std::invalid_argument("inner: component count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.d(); ++i) s += inner(u[i], v[i]);
  return s;
}

double l2_norm(const FieldVector& u) { return std::sqrt(inner(u, u)); }

Projection nehari_project(const Params& p, const FieldVector& u) {
  if (u.is_zero()) throw ProjectionError("cannot project the zero field onto the Nehari manifold");
  const EnergyBreakdown e = evaluate(p, u);
  const double nl = e.nonlinear();
  if (!(nl > 0.0)) throw ProjectionError("nonlinear part vanishes; Nehari projection undefined");
  Projection out;
  out.t = std::pow(e.quadratic / nl, 1.0 / (2.0 * p.q - 2.0));
  out.field = u;
  if (out.t != 1.0) out.field *= out.t;
  return out;
}

double projected_energy(const Params& p, const EnergyBreakdown& e) {
  const double nl = e.nonlinear();
  if (!(nl > 0.0)) return std::numeric_limits<double>::infinity();
  const double q = p.q;
  const double ratio = e.quadratic / nl;
  // t^2 Q with t^{2q-2} = Q/N
  return (0.5 - 0.5 / q) * std::pow(ratio, 1.0 / (q - 1.0)) * e.quadratic;
}

}  // namespace nehari
