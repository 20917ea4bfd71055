#include "nehari/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "nehari/config.hpp"
#include "nehari/random_profile.hpp"
#include "nehari/study.hpp"
#include "nehari/symmetrize.hpp"

namespace nehari {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(idx[k] + 1);
  }
  return s;
}

std::string fields_csv(const FieldVector& u) {
  std::ostringstream os;
  write_fields_csv(os, u.components);
  return os.str();
}

std::string trace_csv(const SolveReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,energy,residual\n";
  for (std::size_t k = 0; k < r.trace.size(); ++k)
    os << k << ',' << r.trace[k].energy << ',' << r.trace[k].residual << '\n';
  return os.str();
}

struct Context {
  RunConfig cfg;
  GridPtr grid;
  std::ostream& out;
  std::ostream& err;

  std::filesystem::path file(const std::string& suffix) const {
    return std::filesystem::path(cfg.output_dir) / (cfg.output_prefix + suffix);
  }
};

int cmd_solve(Context& c) {
  const SolveReport r = solve(c.cfg.problem, c.grid, c.cfg.solver);
  const std::string report = format_report(r);
  write_atomic(c.file("_report.txt"), report);
  write_atomic(c.file("_field.csv"), fields_csv(r.minimizer));
  write_atomic(c.file("_trace.csv"), trace_csv(r));
  for (std::size_t a = 0; a < r.alternates.size(); ++a)
    write_atomic(c.file("_alt" + std::to_string(a + 1) + "_field.csv"), fields_csv(r.alternates[a]));
  c.out << report;
  if (!r.converged()) {
    c.err << "solve did not converge: " << to_string(r.status) << ", residual " << r.residual << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_scalar(Context& c) {
  const Params& p = c.cfg.problem;
  std::ostringstream csv;
  csv.precision(17);
  csv << "component,lambda,mu,level,residual,status,iterations\n";
  FieldVector profiles(c.grid, p.d());
  bool ok = true;
  for (std::size_t i = 0; i < p.d(); ++i) {
    const SolveReport r = scalar_solve(p, i, c.grid, c.cfg.solver);
    csv << i + 1 << ',' << p.lambda[i] << ',' << p.mu[i] << ',' << r.level << ',' << r.residual
        << ',' << to_string(r.status) << ',' << r.iterations << '\n';
    profiles[i] = r.minimizer[0];
    ok = ok && r.converged();
  }
  write_atomic(c.file("_scalar.csv"), csv.str());
  write_atomic(c.file("_scalar_field.csv"), fields_csv(profiles));
  c.out << csv.str();
  if (!ok) {
    c.err << "a scalar solve did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

std::vector<std::size_t> all_but(std::size_t d, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d; ++i)
    if (i != k) idx.push_back(i);
  return idx;
}

int cmd_subsystems(Context& c) {
  const Params& p = c.cfg.problem;
  if (p.d() < 2) throw ConfigError("subsystems: requires d >= 2");
  std::ostringstream csv;
  csv.precision(17);
  csv << "omitted,components,level,classification,residual,status\n";
  bool ok = true;
  for (std::size_t k = 0; k < p.d(); ++k) {
    const SolveReport r = subsystem_solve(p, all_but(p.d(), k), c.grid, c.cfg.solver);
    csv << k + 1 << ',' << join_indices(r.components) << ',' << r.level << ','
        << r.classification.label() << ',' << r.residual << ',' << to_string(r.status) << '\n';
    ok = ok && r.converged();
  }
  write_atomic(c.file("_subsystems.csv"), csv.str());
  c.out << csv.str();
  if (!ok) {
    c.err << "a subsystem solve did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

std::vector<double> theta_values(const RunConfig& cfg) {
  return log_grid(cfg.theta.min, cfg.theta.max, cfg.theta.points);
}

void describe_construction(std::ostream& os, const std::string& prefix, const TestConstruction& t) {
  os << prefix << "theta = " << t.theta << '\n'
     << prefix << "t = " << t.t << '\n'
     << prefix << "lhs = " << t.lhs << '\n'
     << prefix << "rhs = " << t.rhs << '\n'
     << prefix << "energy_new = " << t.energy_new << '\n'
     << prefix << "energy_gain = " << t.energy_gain << '\n'
     << prefix << "chain_consistent = " << yes_no(t.chain_consistent()) << '\n';
}

int cmd_theta_search(Context& c) {
  const Params& p = c.cfg.problem;
  if (p.d() < 2) throw ConfigError("theta-search: requires d >= 2");
  std::size_t best = 0;
  std::vector<SolveReport> subs;
  for (std::size_t k = 0; k < p.d(); ++k) {
    subs.push_back(subsystem_solve(p, all_but(p.d(), k), c.grid, c.cfg.solver));
    if (subs[k].level < subs[best].level) best = k;
  }
  const RadialField w = scalar_solve(p, best, c.grid, c.cfg.solver).minimizer[0];
  ThetaSearchResult res;
  try {
    res = theta_search(p, subs[best], w, theta_values(c.cfg));
  } catch (const ConstructionError& e) {
    c.err << "theta-search: " << e.what() << '\n';
    return kExitNotConverged;
  }
  std::ostringstream csv;
  write_theta_csv(csv, res.evaluated);
  std::ostringstream rep;
  rep.precision(17);
  rep << "omitted = " << best + 1 << '\n' << "base_level = " << subs[best].level << '\n';
  rep << "evaluated = " << res.evaluated.size() << '\n';
  if (res.best) {
    rep << "found = true\n";
    describe_construction(rep, "best.", *res.best);
  } else {
    rep << "found = false\n";
  }
  write_atomic(c.file("_theta.csv"), csv.str());
  write_atomic(c.file("_theta.txt"), rep.str());
  c.out << rep.str();
  return kExitOk;
}

int cmd_threshold(Context& c) {
  const Params& p = c.cfg.problem;
  if (p.d() != 2) throw ConfigError("threshold: requires d = 2");
  if (!c.cfg.coupling_grid && !c.cfg.bracket_lo)
    throw ConfigError("threshold: give threshold.b_lo/b_hi or threshold.grid_*");
  std::vector<ScanRow> rows;
  std::ostringstream rep;
  rep.precision(17);
  if (c.cfg.coupling_grid) {
    const LogRange& g = *c.cfg.coupling_grid;
    const auto grid_rows = coupling_scan(p, log_grid(g.min, g.max, g.points), c.grid, c.cfg.solver);
    std::size_t nontrivial = 0;
    for (const auto& r : grid_rows) nontrivial += r.classification.nontrivial() ? 1 : 0;
    rep << "grid_points = " << grid_rows.size() << '\n' << "grid_nontrivial = " << nontrivial << '\n';
    rows.insert(rows.end(), grid_rows.begin(), grid_rows.end());
  }
  int code = kExitOk;
  if (c.cfg.bracket_lo) {
    try {
      const ThresholdResult t = threshold_scan(p, c.grid, c.cfg.solver, *c.cfg.bracket_lo,
                                               *c.cfg.bracket_hi, c.cfg.bracket_width);
      rep << "b_lo = " << t.b_lo << '\n' << "b_hi = " << t.b_hi << '\n'
          << "width = " << t.b_hi - t.b_lo << '\n';
      rows.insert(rows.end(), t.trace.begin(), t.trace.end());
    } catch (const BracketError& e) {
      c.err << "threshold: " << e.what() << '\n';
      rep << "bracket_error = " << e.what() << '\n'
          << "b_lo.level = " << e.lo.level << '\n' << "b_hi.level = " << e.hi.level << '\n';
      rows.push_back(e.lo);
      rows.push_back(e.hi);
      code = kExitBracket;
    }
  }
  std::ostringstream csv;
  write_scan_csv(csv, rows);
  write_atomic(c.file("_scan.csv"), csv.str());
  write_atomic(c.file("_threshold.txt"), rep.str());
  c.out << rep.str();
  return code;
}

std::string induction_text(const InductionReport& r, bool below_all) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < r.subsystems.size(); ++k) {
    const std::string pre = "subsystem.omit" + std::to_string(k + 1) + ".";
    os << pre << "level = " << r.subsystems[k].level << '\n'
       << pre << "classification = " << r.subsystems[k].classification.label() << '\n'
       << pre << "status = " << to_string(r.subsystems[k].status) << '\n';
  }
  os << "argmin = " << r.argmin + 1 << '\n' << "base_level = " << r.base_level << '\n';
  if (r.theta.best)
    describe_construction(os, "construction.", *r.theta.best);
  else
    os << "construction = none\n";
  os << "full.level = " << r.full.level << '\n'
     << "full.classification = " << r.full.classification.label() << '\n'
     << "full.status = " << to_string(r.full.status) << '\n'
     << "construction_undercuts = " << yes_no(r.construction_undercuts) << '\n'
     << "full_below_construction = " << yes_no(r.full_below_construction) << '\n'
     << "full_below_all_subsystems = " << yes_no(below_all) << '\n'
     << "full_nontrivial = " << yes_no(r.full_nontrivial) << '\n'
     << "passed = " << yes_no(r.passed() && below_all) << '\n'
     << "summary = " << (below_all ? "full < all subsystem levels" : "full not below all subsystem levels")
     << '\n';
  return os.str();
}

int cmd_audit(Context& c) {
  const Params& p = c.cfg.problem;
  std::mt19937_64 gen(c.cfg.solver.seed);
  const double corrupt = c.cfg.audit_corrupt ? 1.25 : 1.0;
  std::ostringstream csv;
  csv.precision(17);
  csv << "sample,kind,i,j,p,lhs,rhs,slack,tolerance,ok\n";
  std::size_t bad = 0, total = 0;
  for (std::size_t s = 0; s < c.cfg.audit_samples; ++s) {
    const bool sign_changing = s % 2 == 0;
    const auto prof = random_profiles(gen, c.grid->radius(), p.d(), sign_changing);
    const AuditReport rep =
        audit_inequalities(p, sample_all(prof, c.grid), c.cfg.audit_tolerance, corrupt);
    for (const AuditRow& row : rep.rows) {
      ++total;
      csv << s << ',' << to_string(row.kind) << ',' << row.i + 1 << ',' << row.j + 1 << ','
          << row.p << ',' << row.lhs << ',' << row.rhs << ',' << row.slack << ','
          << row.tolerance << ',' << (row.ok ? 1 : 0) << '\n';
      if (!row.ok) {
        if (bad < 20)
          c.err << "violation: sample " << s << ' ' << to_string(row.kind) << " i=" << row.i + 1
                << " j=" << row.j + 1 << " lhs=" << row.lhs << " rhs=" << row.rhs << '\n';
        ++bad;
      }
    }
  }
  write_atomic(c.file("_audit.csv"), csv.str());
  c.out << "rearrangement_rows = " << total << '\n' << "rearrangement_violations = " << bad << '\n';
  bool induction_ok = true;
  if (c.cfg.audit_induction && p.d() >= 2 && p.q < 2.0) {
    const InductionReport r = induction_audit(p, c.grid, c.cfg.solver, theta_values(c.cfg));
    bool below_all = true;
    for (const auto& s : r.subsystems) below_all = below_all && r.full.level < s.level;
    const std::string text = induction_text(r, below_all);
    write_atomic(c.file("_induction.txt"), text);
    c.out << text;
    induction_ok = r.passed() && below_all;
    if (!induction_ok) c.err << "induction audit failed\n";
  }
  return bad == 0 && induction_ok ? kExitOk : kExitAudit;
}

}  // namespace

std::string format_report(const SolveReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "status = " << to_string(r.status) << '\n'
     << "iterations = " << r.iterations << '\n'
     << "start = " << r.start_index << '\n'
     << "level = " << r.level << '\n'
     << "residual = " << r.residual << '\n'
     << "classification = " << r.classification.label() << '\n'
     << "quadratic = " << r.energy.quadratic << '\n'
     << "self = " << r.energy.self << '\n'
     << "coupling = " << r.energy.coupling << '\n'
     << "tau = " << r.energy.tau << '\n'
     << "boundary_value = " << r.boundary_value << '\n'
     << "positive_at_origin = " << yes_no(r.positive_at_origin()) << '\n';
  for (std::size_t i = 0; i < r.component_mass.size(); ++i) {
    const std::size_t orig = r.components.empty() ? i : r.components[i];
    const std::string pre = "component" + std::to_string(orig + 1) + ".";
    os << pre << "mass = " << r.component_mass[i] << '\n'
       << pre << "balance = " << r.component_balance[i] << '\n'
       << pre << "origin = " << r.minimizer[i][0] << '\n';
  }
  os << "alternates = " << r.alternates.size() << '\n';
  return os.str();
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of coupled radial NLS systems by Nehari minimization"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  using Handler = int (*)(Context&);
  const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands = {
      {"solve", {"ground state of the full system", cmd_solve}},
      {"scalar", {"scalar ground state of every component", cmd_scalar}},
      {"subsystems", {"ground states of all (d-1)-component subsystems", cmd_subsystems}},
      {"theta-search", {"test-function scan over theta", cmd_theta_search}},
      {"threshold", {"coupling scan and bisection for d = 2", cmd_threshold}},
      {"audit", {"rearrangement inequalities and induction audit", cmd_audit}},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    sub->add_option("--config,-c", config_path, "config file")->required();
    sub->add_option("--set", overrides, "override, section.key=value");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (!subs[k]->parsed()) continue;
      Context ctx{load_config(config_path, overrides), nullptr, out, err};
      ctx.grid = ctx.cfg.make_grid();
      return commands[k].second.second(ctx);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AdmissibilityError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace nehari
