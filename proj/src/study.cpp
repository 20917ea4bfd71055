#include "nehari/study.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nehari {

double condition_lhs(double q, double theta, double c1, double c2, double mu) {
  const double growth = std::expm1(q * std::log1p(theta * theta * c1));
  const double self = mu * std::pow(theta, 2.0 * q) * c2;
  return (growth - self) / std::pow(theta, q);
}

double TestConstruction::contraction_margin() const {
  return -std::expm1(2.0 * log_t + std::log1p(C1 * theta * theta));
}

bool TestConstruction::chain_consistent() const {
  const double scale = std::max(std::abs(rhs), std::abs(lhs));
  if (!(scale > 0.0) || !(energy_base > 0.0)) return false;
  const double n1 = (rhs - lhs) / scale;
  const double m2 = contraction_margin();
  const double m3 = energy_gain / energy_base;
  // Inside the ambiguity band the inequality is undecided at this precision.
  if (std::abs(n1) <= 1e-8) return true;
  if (std::abs(m2 - m3) > 1e-8 * std::max(std::abs(m2), std::abs(m3))) return false;
  const bool s1 = n1 > 0.0, s2 = m2 > 0.0, s3 = m3 > 0.0;
  return s1 == s2 && s2 == s3;
}

namespace {

std::size_t omitted_index(const SolveReport& base, std::size_t d) {
  if (base.components.size() + 1 != d)
    throw ConstructionError("base must be a ground state of a subsystem with d - 1 components");
  std::vector<bool> present(d, false);
  for (std::size_t i : base.components) {
    if (i >= d || present[i]) throw ConstructionError("base component indices are invalid");
    present[i] = true;
  }
  return static_cast<std::size_t>(std::find(present.begin(), present.end(), false) -
                                  present.begin());
}

}  // namespace

TestConstruction test_function_check(const Params& p, const SolveReport& base,
                                     const RadialField& w, double theta) {
  p.validate();
  const std::size_t d = p.d();
  const std::size_t k = omitted_index(base, d);
  if (!base.classification.nontrivial())
    throw ConstructionError("base ground state is not nontrivial (" +
                            base.classification.label() + ")");
  if (!(theta > 0.0)) throw ConstructionError("theta must be positive");
  if (w.is_zero()) throw ConstructionError("profile w must be nonzero");
  const FieldVector& u = base.minimizer;
  require_same_grid(u[0], w);

  const Params sub = p.restrict_to(base.components);
  const EnergyBreakdown be = evaluate(sub, u);
  if (!(std::abs(be.tau) <= 1e-6 * be.quadratic))
    throw ConstructionError("base field is not on the Nehari manifold");

  const double q = p.q;
  const double mu_k = p.mu[k];
  const double Qb = be.quadratic;
  const double Nb = be.nonlinear();
  const double Wq = norm_lambda_sq(w, p.lambda[k]);
  const double Ws = lp_integral(w, 2.0 * q);

  TestConstruction c;
  c.theta = theta;
  c.omitted = k;
  c.C1 = Wq / Qb;
  c.C2 = Ws / Qb;
  double cross = 0.0;  // sum_i b_ik |u_i w|_q^q
  for (std::size_t a = 0; a < u.d(); ++a) {
    const double x = mixed_term(u[a], w, q);
    c.D.push_back(x / Qb);
    cross += p.coupling(base.components[a], k) * x;
  }
  c.rhs = 0.0;
  for (std::size_t a = 0; a < u.d(); ++a) c.rhs += 2.0 * p.coupling(base.components[a], k) * c.D[a];
  c.lhs = condition_lhs(q, theta, c.C1, c.C2, mu_k);

  const double th_q = std::pow(theta, q);
  const double th_2q = std::pow(theta, 2.0 * q);
  const double extra = mu_k * th_2q * c.C2 + th_q * c.rhs;  // den - 1
  const double log_t = (std::log1p(theta * theta * c.C1) - std::log1p(extra)) / (2.0 * q - 2.0);
  c.log_t = log_t;
  c.t = std::exp(log_t);
  {
    const double num = 1.0 + theta * theta * c.C1;
    const double den = 1.0 + extra;
    c.identity_residual = std::abs(std::pow(c.t, 2.0 * q - 2.0) * den - num) / num;
  }

  FieldVector field(u.grid_ptr(), d);
  for (std::size_t a = 0; a < u.d(); ++a) field[base.components[a]] = c.t * u[a];
  field[k] = (c.t * theta) * w;
  const EnergyBreakdown e = evaluate(p, field);
  c.tau_relative = std::abs(e.tau) / e.quadratic;
  if (!(c.tau_relative <= 1e-6))
    throw ConstructionError("assembled field is off the Nehari manifold");
  c.energy_new = e.I;
  c.energy_base = base.level;

  const double s2 = std::expm1(2.0 * log_t);
  const double s2q = std::expm1(2.0 * q * log_t);
  const double t2 = std::exp(2.0 * log_t);
  const double t2q = std::exp(2.0 * q * log_t);
  const double delta = 0.5 * (s2 * Qb + t2 * theta * theta * Wq) -
                       (s2q * Nb + t2q * (mu_k * th_2q * Ws + 2.0 * th_q * cross)) / (2.0 * q);
  c.energy_gain = -delta;
  c.field = std::move(field);
  return c;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi >= lo) || points < 1) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  return g;
}

std::vector<double> default_theta_grid() { return log_grid(1e-4, 10.0, 61); }

ThetaSearchResult theta_search(const Params& p, const SolveReport& base, const RadialField& w,
                               const std::vector<double>& theta_grid) {
  ThetaSearchResult out;
  out.evaluated.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    TestConstruction c = test_function_check(p, base, w, theta);
    if (c.passes() && (!out.best || c.energy_gain > out.best->energy_gain)) out.best = c;
    c.field = FieldVector{};
    out.evaluated.push_back(std::move(c));
  }
  return out;
}

InductionReport induction_audit(const Params& p, const GridPtr& grid, const SolverConfig& cfg,
                                const std::vector<double>& theta_grid) {
  p.validate();
  const std::size_t d = p.d();
  if (d < 2) throw std::invalid_argument("induction_audit: need d >= 2");
  if (!(p.q < 2.0)) throw std::invalid_argument("induction_audit: requires 1 < q < 2");

  InductionReport rep;
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d; ++i)
      if (i != k) idx.push_back(i);
    try {
      rep.subsystems.push_back(subsystem_solve(p, idx, grid, cfg));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "subsystem omitting component " << k + 1 << " failed: " << e.what();
      throw SubsystemFailure(msg.str(), idx);
    }
  }
  for (std::size_t k = 1; k < d; ++k)
    if (rep.subsystems[k].level < rep.subsystems[rep.argmin].level) rep.argmin = k;
  const SolveReport& base = rep.subsystems[rep.argmin];
  rep.base_level = base.level;

  const RadialField w = scalar_solve(p, rep.argmin, grid, cfg).minimizer[0];
  rep.theta = theta_search(p, base, w, theta_grid);
  rep.full = solve(p, grid, cfg);

  if (rep.theta.best) {
    const TestConstruction& best = *rep.theta.best;
    rep.construction_undercuts = best.undercuts();
    rep.full_below_construction =
        rep.full.level <= best.energy_new + 1e-9 * std::abs(best.energy_new);
  }
  rep.full_nontrivial = rep.full.classification.nontrivial() && rep.full.positive_at_origin();
  return rep;
}

ScanRow scan_point(const Params& tmpl, double b, const GridPtr& grid, const SolverConfig& cfg) {
  if (tmpl.d() != 2) throw std::invalid_argument("coupling scan requires d = 2");
  Params p = tmpl;
  p.set_coupling(0, 1, b);
  const SolveReport r = solve(p, grid, cfg);
  return ScanRow{b, r.level, r.classification, r.component_mass, r.converged()};
}

std::vector<ScanRow> coupling_scan(const Params& tmpl, const std::vector<double>& b_values,
                                   const GridPtr& grid, const SolverConfig& cfg) {
  std::vector<ScanRow> rows;
  rows.reserve(b_values.size());
  for (double b : b_values) rows.push_back(scan_point(tmpl, b, grid, cfg));
  return rows;
}

ThresholdResult threshold_scan(const Params& tmpl, const GridPtr& grid, const SolverConfig& cfg,
                               double b_lo, double b_hi, double width) {
  if (!(b_lo > 0.0 && b_hi > b_lo)) throw std::invalid_argument("threshold_scan: need 0 < b_lo < b_hi");
  if (!(width > 0.0)) throw std::invalid_argument("threshold_scan: width must be positive");
  ThresholdResult res;
  ScanRow lo = scan_point(tmpl, b_lo, grid, cfg);
  ScanRow hi = scan_point(tmpl, b_hi, grid, cfg);
  res.trace = {lo, hi};
  const bool lo_ok = lo.classification.kind == Classification::Kind::Semitrivial;
  const bool hi_ok = hi.classification.nontrivial();
  if (!lo_ok || !hi_ok) {
    std::ostringstream msg;
    msg << "invalid bracket: b_lo = " << b_lo << " is " << lo.classification.label()
        << ", b_hi = " << b_hi << " is " << hi.classification.label()
        << " (need semitrivial below, nontrivial above)";
    throw BracketError(msg.str(), lo, hi);
  }
  res.b_lo = b_lo;
  res.b_hi = b_hi;
  while (res.b_hi - res.b_lo > width) {
    const double mid = 0.5 * (res.b_lo + res.b_hi);
    ScanRow row = scan_point(tmpl, mid, grid, cfg);
    if (row.classification.nontrivial())
      res.b_hi = mid;
    else
      res.b_lo = mid;
    res.trace.push_back(std::move(row));
  }
  return res;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  const auto old = os.precision(17);
  std::size_t d = 0;
  for (const auto& r : rows) d = std::max(d, r.masses.size());
  os << "b,level,classification,converged";
  for (std::size_t i = 0; i < d; ++i) os << ",mass" << i + 1;
  os << '\n';
  for (const auto& r : rows) {
    os << r.b << ',' << r.level << ',' << r.classification.label() << ',' << (r.converged ? 1 : 0);
    for (double m : r.masses) os << ',' << m;
    os << '\n';
  }
  os.precision(old);
}

void write_theta_csv(std::ostream& os, const std::vector<TestConstruction>& rows) {
  const auto old = os.precision(17);
  std::size_t nd = rows.empty() ? 0 : rows.front().D.size();
  os << "theta,t,C1,C2";
  for (std::size_t i = 0; i < nd; ++i) os << ",D" << i + 1;
  os << ",lhs,rhs,energy_new,energy_base,energy_gain,passes,chain_consistent\n";
  for (const auto& c : rows) {
    os << c.theta << ',' << c.t << ',' << c.C1 << ',' << c.C2;
    for (double x : c.D) os << ',' << x;
    os << ',' << c.lhs << ',' << c.rhs << ',' << c.energy_new << ',' << c.energy_base << ','
       << c.energy_gain << ',' << (c.passes() ? 1 : 0) << ',' << (c.chain_consistent() ? 1 : 0)
       << '\n';
  }
  os.precision(old);
}

}  // namespace nehari
