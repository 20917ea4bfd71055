#include "nehari/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace nehari {

RearrangedField rearrange(const RadialField& u) {
  const RadialGrid& g = u.grid();
  const auto w = g.weights();
  const std::size_t size = u.size();

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(u[a]) > std::abs(u[b]);
  });

  std::vector<double> out(size);
  std::size_t slot = 0;        // index into `order`
  double slot_end = w[order[0]];
  double cell_start = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double cell_end = cell_start + w[k];
    const double centre = 0.5 * (cell_start + cell_end);
    while (slot + 1 < size && slot_end <= centre) {
      ++slot;
      slot_end += w[order[slot]];
    }
    out[k] = std::abs(u[order[slot]]);
    cell_start = cell_end;
  }

  RearrangedField r{RadialField(u.grid_ptr(), std::move(out)), false};
  r.monotone_certificate = is_nonincreasing(r.field);
  return r;
}

FieldVector rearrange(const FieldVector& u) {
  FieldVector out;
  out.components.reserve(u.d());
  for (const auto& c : u.components) out.components.push_back(rearrange(c).field);
  return out;
}

bool is_nonincreasing(const RadialField& u) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] < 0.0) return false;
    if (k > 0 && u[k] > u[k - 1]) return false;
  }
  return true;
}

std::string to_string(AuditKind kind) {
  switch (kind) {
    case AuditKind::LpPreserve: return "lp_preserve";
    case AuditKind::PolyaSzego: return "polya_szego";
    case AuditKind::AbsGradient: return "abs_gradient";
    case AuditKind::HardyLittlewood: return "hardy_littlewood";
    case AuditKind::TauComparison: return "tau_comparison";
  }
  return "unknown";
}

double AuditRow::relative_violation() const {
  if (kind == AuditKind::LpPreserve) {
    const double scale = std::max(std::abs(rhs), std::abs(lhs));
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  const double excess = lhs - rhs;
  if (excess <= 0.0) return 0.0;
  const double scale = std::max(std::abs(rhs), std::abs(lhs));
  return scale > 0.0 ? excess / scale : excess;
}

bool AuditReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const AuditRow& r) { return r.ok; });
}

std::size_t AuditReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const AuditRow& r) { return !r.ok; }));
}

double AuditReport::max_relative_violation(AuditKind kind) const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.kind == kind) m = std::max(m, r.relative_violation());
  return m;
}

namespace {

RadialField absolute(const RadialField& u) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x = std::abs(x);
  return RadialField(u.grid_ptr(), std::move(v));
}

AuditRow inequality_row(AuditKind kind, int i, int j, double p, double lhs, double rhs,
                        double tolerance) {
  AuditRow row{kind, i, j, p, lhs, rhs, rhs - lhs, tolerance, true};
  row.ok = lhs <= rhs + tolerance;
  return row;
}

}  // namespace

AuditReport audit_inequalities(const Params& p, const FieldVector& u, const AuditTolerance& tol,
                               double corrupt) {
  AuditReport report;
  const RadialGrid& g = u.grid();
  const double h = g.h();
  const double band = tol.quad + tol.gradient_band * h;

  FieldVector star = rearrange(u);
  if (corrupt != 1.0) star *= corrupt;

  for (std::size_t i = 0; i < u.d(); ++i) {
    const int ii = static_cast<int>(i);
    const RadialField abs_u = absolute(u[i]);
    for (double pexp : {2.0, 2.0 * p.q}) {
      const double lhs = lp_integral(star[i], pexp);
      const double rhs = lp_integral(u[i], pexp);
      // quantization: one cell of the decreasing distribution function
      const double quant = g.max_weight() * std::pow(u[i].max_abs(), pexp);
      AuditRow row{AuditKind::LpPreserve, ii, -1, pexp, lhs, rhs, rhs - lhs,
                   tol.quad * std::abs(rhs) + quant, true};
      row.ok = std::abs(lhs - rhs) <= row.tolerance;
      report.rows.push_back(row);
    }
    {
      const double lhs = gradient_sq_integral(star[i]);
      const double rhs = gradient_sq_integral(abs_u);
      report.rows.push_back(
          inequality_row(AuditKind::PolyaSzego, ii, -1, 2.0, lhs, rhs, band * std::abs(rhs)));
    }
    {
      const double lhs = gradient_sq_integral(abs_u);
      const double rhs = gradient_sq_integral(u[i]);
      report.rows.push_back(inequality_row(AuditKind::AbsGradient, ii, -1, 2.0, lhs, rhs,
                                           tol.quad * std::abs(rhs)));
    }
  }
  for (std::size_t i = 0; i < u.d(); ++i) {
    for (std::size_t j = i + 1; j < u.d(); ++j) {
      const double lhs = mixed_term(u[i], u[j], p.q);
      const double rhs = mixed_term(star[i], star[j], p.q);
      report.rows.push_back(inequality_row(AuditKind::HardyLittlewood, static_cast<int>(i),
                                           static_cast<int>(j), p.q, lhs, rhs,
                                           band * std::max(std::abs(rhs), std::abs(lhs))));
    }
  }
  {
    const EnergyBreakdown before = evaluate(p, u);
    const EnergyBreakdown after = evaluate(p, star);
    const double scale = before.quadratic + before.nonlinear();
    report.rows.push_back(inequality_row(AuditKind::TauComparison, -1, -1, p.q, after.tau,
                                         before.tau, band * scale));
  }
  return report;
}

void write_audit_csv(std::ostream& os, const AuditReport& report) {
  const auto old_prec = os.precision(17);
  os << "kind,i,j,p,lhs,rhs,slack,tolerance,ok\n";
  for (const auto& r : report.rows) {
    os << to_string(r.kind) << ',' << (r.i < 0 ? 0 : r.i + 1) << ',' << (r.j < 0 ? 0 : r.j + 1)
       << ',' << r.p << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ',' << r.tolerance
       << ',' << (r.ok ? 1 : 0) << '\n';
  }
  os.precision(old_prec);
}

}  // namespace nehari
