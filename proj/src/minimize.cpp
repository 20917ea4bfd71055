#include "nehari/minimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "nehari/symmetrize.hpp"

namespace nehari {

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0)) throw std::invalid_argument("solver: tol_residual must be > 0");
  if (!(armijo_factor > 0.0 && armijo_factor < 1.0))
    throw std::invalid_argument("solver: armijo_factor must lie in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw std::invalid_argument("solver: armijo_c must lie in (0, 1)");
  if (!(step0 > 0.0) || !(step_max >= step0))
    throw std::invalid_argument("solver: need 0 < step0 <= step_max");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (symmetrize_every < 0) throw std::invalid_argument("solver: symmetrize_every must be >= 0");
  if (multistart < 0) throw std::invalid_argument("solver: multistart must be >= 0");
  if (!(tol_null >= 0.0)) throw std::invalid_argument("solver: tol_null must be >= 0");
  if (!(tol_balance > 0.0 && tol_balance < 1.0))
    throw std::invalid_argument("solver: tol_balance must lie in (0, 1)");
  if (workers < 1) throw std::invalid_argument("solver: workers must be >= 1");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Stalled: return "stalled";
  }
  return "unknown";
}

std::string Classification::label() const {
  switch (kind) {
    case Kind::Nontrivial: return "nontrivial";
    case Kind::Zero: return "zero";
    case Kind::Semitrivial: {
      std::ostringstream os;
      os << "semitrivial(";
      for (std::size_t k = 0; k < null_components.size(); ++k)
        os << (k ? " " : "") << null_components[k] + 1;
      os << ")";
      return os.str();
    }
  }
  return "unknown";
}

bool SolveReport::positive_at_origin() const {
  for (const auto& c : minimizer.components)
    if (!(c[0] > 0.0)) return false;
  return true;
}

double default_radius(const Params& p) {
  const double lmin = *std::min_element(p.lambda.begin(), p.lambda.end());
  return 20.0 / std::sqrt(lmin);
}

RadialField gaussian_profile(const GridPtr& grid, double lambda, double q) {
  RadialField g = RadialField::sample(grid, [lambda](double r) { return std::exp(-lambda * r * r); });
  g *= 1.0 / lp_norm(g, 2.0 * q);
  return g;
}

Classification classify(const std::vector<double>& mass, const std::vector<double>& balance,
                        double tol_null, double tol_balance) {
  Classification c;
  const double top = mass.empty() ? 0.0 : *std::max_element(mass.begin(), mass.end());
  if (!(top > 0.0)) {
    c.kind = Classification::Kind::Zero;
    for (std::size_t i = 0; i < mass.size(); ++i) c.null_components.push_back(i);
    return c;
  }
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const bool vanished = mass[i] == 0.0;
    const bool small = mass[i] < tol_null * top;
    const bool draining = balance[i] < 1.0 - tol_balance;
    if (vanished || (small && draining)) c.null_components.push_back(i);
  }
  c.kind = c.null_components.empty() ? Classification::Kind::Nontrivial
                                     : Classification::Kind::Semitrivial;
  return c;
}

namespace {

struct ComponentState {
  std::vector<double> mass;
  std::vector<double> balance;
};

ComponentState component_state(const Params& p, const FieldVector& u) {
  const ComponentTerms t = component_terms(p, u);
  const std::size_t d = u.d();
  ComponentState s;
  s.mass.resize(d);
  s.balance.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    s.mass[i] = std::pow(t.self[i] / p.mu[i], 1.0 / (2.0 * p.q));
    double nl = t.self[i];
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) nl += p.coupling(i, j) * t.pair[i * d + j];
    s.balance[i] = t.quadratic[i] > 0.0 ? nl / t.quadratic[i] : 0.0;
  }
  return s;
}

// Small components must have reached a stationary regime before stopping:
// either balanced (a genuine nonzero part of the critical point) or
// draining at a steady rate (a decaying null direction).
bool small_components_settled(const ComponentState& now, const ComponentState& before,
                              const SolverConfig& cfg) {
  const double top = *std::max_element(now.mass.begin(), now.mass.end());
  for (std::size_t i = 0; i < now.mass.size(); ++i) {
    if (!(now.mass[i] < cfg.tol_null * top) || now.mass[i] == 0.0) continue;
    const double sigma = now.balance[i];
    const bool balanced = std::abs(sigma - 1.0) <= 0.1 * cfg.tol_balance;
    const bool draining = sigma < 1.0 - cfg.tol_balance &&
                          std::abs(sigma - before.balance[i]) <= 1e-4;
    if (!balanced && !draining) return false;
  }
  return true;
}

FieldVector sobolev_direction(const Params& p, const FieldVector& g) {
  FieldVector s;
  s.components.reserve(g.d());
  for (std::size_t i = 0; i < g.d(); ++i)
    s.components.push_back(solve_shifted_laplacian(g[i], p.lambda[i]));
  return s;
}

SolveReport finish(const Params& p, FieldVector u, const SolverConfig& cfg) {
  SolveReport r;
  r.energy = evaluate(p, u);
  r.level = r.energy.I;
  const ComponentState s = component_state(p, u);
  r.component_mass = s.mass;
  r.component_balance = s.balance;
  r.classification = classify(s.mass, s.balance, cfg.tol_null, cfg.tol_balance);
  const std::size_t edge = u.grid().cells() - 1;
  for (const auto& c : u.components) r.boundary_value = std::max(r.boundary_value, std::abs(c[edge]));
  r.minimizer = std::move(u);
  return r;
}

}  // namespace

SolveReport descend(const Params& p, FieldVector init, const SolverConfig& cfg,
                    std::size_t start_index) {
  p.validate();
  cfg.validate();
  if (init.d() != p.d()) throw std::invalid_argument("descend: init has wrong component count");

  const bool symmetrize = cfg.symmetrize_every > 0;
  FieldVector u = symmetrize ? rearrange(init) : std::move(init);
  u = nehari_project(p, u).field;

  const double round = 64.0 * std::numeric_limits<double>::epsilon();
  std::vector<TraceEntry> trace;
  trace.reserve(static_cast<std::size_t>(std::min(cfg.max_iter, 20000)) + 1);

  SolveStatus status = SolveStatus::MaxIterations;
  double alpha = cfg.step0;
  double residual = 0.0;
  int it = 0;
  EnergyBreakdown e = evaluate(p, u);
  std::optional<ComponentState> checkpoint;
  int checkpoint_iter = 0;

  for (;; ++it) {
    const FieldVector g = gradient(p, u);
    residual = l2_norm(g);
    trace.push_back({e.I, residual});

    if (residual < cfg.tol_residual) {
      ComponentState now = component_state(p, u);
      if (checkpoint && it - checkpoint_iter >= 10) {
        if (small_components_settled(now, *checkpoint, cfg)) {
          status = SolveStatus::Converged;
          break;
        }
        checkpoint = std::move(now);
        checkpoint_iter = it;
      } else if (!checkpoint) {
        const double top = *std::max_element(now.mass.begin(), now.mass.end());
        const bool any_small = std::any_of(now.mass.begin(), now.mass.end(), [&](double m) {
          return m > 0.0 && m < cfg.tol_null * top;
        });
        if (!any_small) {
          status = SolveStatus::Converged;
          break;
        }
        checkpoint = std::move(now);
        checkpoint_iter = it;
      }
    }
    if (it >= cfg.max_iter) break;

    const FieldVector s = sobolev_direction(p, g);
    const double slope = inner(g, s);
    const double j0 = e.I;

    double a = std::min(2.0 * alpha, cfg.step_max);
    bool accepted = false;
    FieldVector cand;
    EnergyBreakdown ce;
    while (a >= 1e-12) {
      cand = u;
      cand.axpy(-a, s);
      ce = evaluate(p, cand);
      const double jc = projected_energy(p, ce);
      if (jc <= j0 - cfg.armijo_c * a * slope + round * std::abs(j0)) {
        accepted = true;
        break;
      }
      a *= cfg.armijo_factor;
    }
    if (!accepted) {
      status = SolveStatus::Stalled;
      break;
    }
    alpha = a;
    const double t = std::pow(ce.quadratic / ce.nonlinear(), 1.0 / (2.0 * p.q - 2.0));
    cand *= t;
    u = std::move(cand);

    if (symmetrize && (it + 1) % cfg.symmetrize_every == 0) u = rearrange(u);
    u = nehari_project(p, u).field;
    e = evaluate(p, u);
  }

  SolveReport r = finish(p, std::move(u), cfg);
  r.residual = residual;
  r.status = status;
  r.iterations = it;
  r.trace = std::move(trace);
  r.start_index = start_index;
  for (std::size_t i = 0; i < p.d(); ++i) r.components.push_back(i);
  return r;
}

namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::vector<FieldVector> default_starts(const Params& p, const GridPtr& grid,
                                        const SolverConfig& cfg) {
  const std::size_t d = p.d();
  std::vector<RadialField> base;
  for (std::size_t i = 0; i < d; ++i) base.push_back(gaussian_profile(grid, p.lambda[i], p.q));

  std::vector<FieldVector> starts;
  starts.emplace_back(base);
  if (d == 1) return starts;

  SolverConfig scalar_cfg = cfg;
  scalar_cfg.multistart = 0;
  for (std::size_t i = 0; i < d; ++i) {
    FieldVector f(base);
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) f[j] *= 1e-8;
    f[i] = scalar_solve(p, i, grid, scalar_cfg).minimizer[0];
    starts.push_back(std::move(f));
  }

  for (int s = 0; s < cfg.multistart; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 gen(seq);
    FieldVector f(base);
    for (std::size_t i = 0; i < d; ++i) f[i] *= std::pow(10.0, -2.0 + 4.0 * uniform01(gen));
    starts.push_back(std::move(f));
  }
  return starts;
}

double max_distance(const FieldVector& a, const FieldVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.d(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) m = std::max(m, std::abs(a[i][k] - b[i][k]));
  return m;
}

double max_amplitude(const FieldVector& a) {
  double m = 0.0;
  for (const auto& c : a.components) m = std::max(m, c.max_abs());
  return m;
}

// Lower level wins; ties go to the lower residual, then the earlier start.
bool better(const SolveReport& a, const SolveReport& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.residual != b.residual) return a.residual < b.residual;
  return a.start_index < b.start_index;
}

}  // namespace

SolveReport solve(const Params& p, const GridPtr& grid, const SolverConfig& cfg,
                  const std::optional<FieldVector>& init) {
  p.validate();
  cfg.validate();
  std::vector<FieldVector> starts;
  if (init) {
    if (init->d() != p.d()) throw std::invalid_argument("solve: init has wrong component count");
    if (init->is_zero()) throw ProjectionError("solve: initial field is zero");
    starts.push_back(*init);
  } else {
    starts = default_starts(p, grid, cfg);
  }

  std::vector<std::optional<SolveReport>> runs(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < starts.size(); k = next++) {
      try {
        runs[k] = descend(p, std::move(starts[k]), cfg, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), starts.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (better(*runs[k], *runs[best])) best = k;
  SolveReport report = std::move(*runs[best]);

  const double scale = max_amplitude(report.minimizer);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (k == best) continue;
    const SolveReport& other = *runs[k];
    const double gap = std::abs(other.level - report.level);
    if (gap > 1e-8 * std::abs(report.level)) continue;
    const double dist = max_distance(other.minimizer, report.minimizer);
    if (dist <= 1e-3 * scale) continue;
    bool seen = false;
    for (const auto& alt : report.alternates)
      if (max_distance(alt, other.minimizer) <= 1e-3 * scale) seen = true;
    if (!seen) report.alternates.push_back(other.minimizer);
  }
  return report;
}

SolveReport scalar_solve(const Params& p, std::size_t i, const GridPtr& grid,
                         const SolverConfig& cfg) {
  if (i >= p.d()) throw std::out_of_range("scalar_solve: component index out of range");
  const std::size_t idx[] = {i};
  const Params sub = p.restrict_to(idx);
  SolveReport r = solve(sub, grid, cfg);
  r.components = {i};
  return r;
}

double scalar_level(const Params& p, std::size_t i, const GridPtr& grid, const SolverConfig& cfg) {
  return scalar_solve(p, i, grid, cfg).level;
}

SolveReport subsystem_solve(const Params& p, const std::vector<std::size_t>& indices,
                            const GridPtr& grid, const SolverConfig& cfg) {
  if (indices.empty()) throw std::invalid_argument("subsystem_solve: empty index set");
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("subsystem_solve: repeated index");
  if (sorted.back() >= p.d()) throw std::out_of_range("subsystem_solve: index out of range");
  if (sorted.size() >= p.d()) throw std::invalid_argument("subsystem_solve: subset must be proper");
  const Params sub = p.restrict_to(indices);
  SolveReport r = solve(sub, grid, cfg);
  r.components = indices;
  return r;
}

}  // namespace nehari
