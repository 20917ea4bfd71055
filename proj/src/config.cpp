#include "nehari/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nehari {

namespace {

struct Entry {
  std::string value;
  std::string anchor;  // "file:12" or "--set"
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& anchor, const std::string& key, const std::string& msg) {
  throw ConfigError(anchor + ": " + key + ": " + msg);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schema_version",
      "problem.d", "problem.n", "problem.q", "problem.lambda", "problem.mu", "problem.b",
      "grid.R", "grid.M",
      "solver.max_iter", "solver.tol_residual", "solver.step0", "solver.step_max",
      "solver.armijo_factor", "solver.armijo_c", "solver.symmetrize_every", "solver.multistart",
      "solver.seed", "solver.tol_null", "solver.tol_balance", "solver.workers",
      "theta.min", "theta.max", "theta.points",
      "threshold.b_lo", "threshold.b_hi", "threshold.width", "threshold.grid_min",
      "threshold.grid_max", "threshold.grid_points",
      "audit.samples", "audit.corrupt_rearrangement", "audit.induction", "audit.tol_quad",
      "audit.gradient_band",
      "output.dir", "output.prefix"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key " + key);
    return it->second;
  }

  double number(const std::string& key) const {
    const Entry& e = entry(key);
    return parse_number(e.value, e.anchor, key);
  }

  long long integer(const std::string& key) const {
    const Entry& e = entry(key);
    const double x = parse_number(e.value, e.anchor, key);
    if (x != std::floor(x)) fail(e.anchor, key, "expected an integer, got '" + e.value + "'");
    return static_cast<long long>(x);
  }

  std::size_t count(const std::string& key) const {
    const long long v = integer(key);
    if (v < 0) fail(entry(key).anchor, key, "must be non-negative");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e.anchor, key, "expected true/false, got '" + e.value + "'");
  }

  std::vector<double> list(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), e.anchor, key));
    if (out.empty()) fail(e.anchor, key, "empty list");
    return out;
  }

  std::string text(const std::string& key) const { return entry(key).value; }
  const std::string& anchor(const std::string& key) const { return entry(key).anchor; }

 private:
  static double parse_number(const std::string& s, const std::string& anchor,
                             const std::string& key) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(anchor, key, "expected a number, got '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(x))
      fail(anchor, key, "expected a number, got '" + s + "'");
    return x;
  }

  std::map<std::string, Entry> entries_;
};

void put(std::map<std::string, Entry>& entries, const std::string& key, const std::string& value,
         const std::string& anchor) {
  if (!known_keys().count(key)) throw ConfigError(anchor + ": unknown key '" + key + "'");
  entries[key] = Entry{value, anchor};
}

}  // namespace

GridPtr RunConfig::make_grid() const {
  const double r = radius > 0.0 ? radius : default_radius(problem);
  return nehari::make_grid(problem.n, r, cells);
}

RunConfig parse_config(std::istream& in, const std::string& source,
                       const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::string line;
  int lineno = 0;
  bool saw_version = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string anchor = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(anchor + ": malformed section header '" + body + "'");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(anchor + ": empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(anchor + ": expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(anchor + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!saw_version) {
      if (full != "schema_version")
        throw ConfigError(anchor + ": first entry must be schema_version");
      saw_version = true;
    }
    if (entries.count(full)) throw ConfigError(anchor + ": duplicate key '" + full + "'");
    put(entries, full, value, anchor);
  }
  if (!saw_version) throw ConfigError(source + ": missing schema_version");

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + ov + "'");
    put(entries, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), "--set");
  }

  const Reader r(std::move(entries));
  RunConfig c;
  c.schema_version = static_cast<int>(r.integer("schema_version"));
  if (c.schema_version != 1)
    fail(r.anchor("schema_version"), "schema_version", "unsupported version " + r.text("schema_version"));

  Params& p = c.problem;
  p.n = static_cast<int>(r.integer("problem.n"));
  p.q = r.number("problem.q");
  p.lambda = r.list("problem.lambda");
  p.mu = r.list("problem.mu");
  const std::size_t d = p.lambda.size();
  if (r.has("problem.d") && r.count("problem.d") != d)
    fail(r.anchor("problem.d"), "problem.d", "does not match the length of problem.lambda");
  if (p.mu.size() != d)
    fail(r.anchor("problem.mu"), "problem.mu", "expected " + std::to_string(d) + " entries");
  p.b.assign(d * d, 0.0);
  if (d > 1) {
    const std::vector<double> bl = r.list("problem.b");
    const std::size_t pairs = d * (d - 1) / 2;
    if (bl.size() != 1 && bl.size() != pairs)
      fail(r.anchor("problem.b"), "problem.b",
           "expected 1 value or " + std::to_string(pairs) + " upper-triangular values");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) p.set_coupling(i, j, bl.size() == 1 ? bl[0] : bl[idx++]);
  }
  try {
    p.validate();
  } catch (const AdmissibilityError& e) {
    throw ConfigError(r.anchor("problem.q") + ": problem: " + e.what());
  }

  if (r.has("grid.R")) c.radius = r.number("grid.R");
  if (r.has("grid.M")) c.cells = r.count("grid.M");
  if (c.cells < 8) fail(r.anchor("grid.M"), "grid.M", "need at least 8 cells");
  if (r.has("grid.R") && !(c.radius > 0.0)) fail(r.anchor("grid.R"), "grid.R", "must be positive");

  SolverConfig& s = c.solver;
  if (r.has("solver.max_iter")) s.max_iter = static_cast<int>(r.integer("solver.max_iter"));
  if (r.has("solver.tol_residual")) s.tol_residual = r.number("solver.tol_residual");
  if (r.has("solver.step0")) s.step0 = r.number("solver.step0");
  if (r.has("solver.step_max")) s.step_max = r.number("solver.step_max");
  if (r.has("solver.armijo_factor")) s.armijo_factor = r.number("solver.armijo_factor");
  if (r.has("solver.armijo_c")) s.armijo_c = r.number("solver.armijo_c");
  if (r.has("solver.symmetrize_every")) s.symmetrize_every = static_cast<int>(r.integer("solver.symmetrize_every"));
  if (r.has("solver.multistart")) s.multistart = static_cast<int>(r.integer("solver.multistart"));
  if (r.has("solver.seed")) s.seed = static_cast<std::uint64_t>(r.count("solver.seed"));
  if (r.has("solver.tol_null")) s.tol_null = r.number("solver.tol_null");
  if (r.has("solver.tol_balance")) s.tol_balance = r.number("solver.tol_balance");
  if (r.has("solver.workers")) s.workers = static_cast<int>(r.integer("solver.workers"));
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  if (r.has("theta.min")) c.theta.min = r.number("theta.min");
  if (r.has("theta.max")) c.theta.max = r.number("theta.max");
  if (r.has("theta.points")) c.theta.points = r.count("theta.points");
  if (!(c.theta.min > 0.0 && c.theta.max >= c.theta.min && c.theta.points >= 1))
    throw ConfigError("theta: need 0 < min <= max and points >= 1");

  if (r.has("threshold.b_lo")) c.bracket_lo = r.number("threshold.b_lo");
  if (r.has("threshold.b_hi")) c.bracket_hi = r.number("threshold.b_hi");
  if (c.bracket_lo.has_value() != c.bracket_hi.has_value())
    throw ConfigError("threshold: b_lo and b_hi must be given together");
  if (r.has("threshold.width")) c.bracket_width = r.number("threshold.width");
  if (r.has("threshold.grid_points")) {
    LogRange g;
    g.points = r.count("threshold.grid_points");
    g.min = r.number("threshold.grid_min");
    g.max = r.number("threshold.grid_max");
    if (!(g.min > 0.0 && g.max >= g.min && g.points >= 1))
      throw ConfigError("threshold: need 0 < grid_min <= grid_max and grid_points >= 1");
    c.coupling_grid = g;
  }

  if (r.has("audit.samples")) c.audit_samples = r.count("audit.samples");
  if (r.has("audit.corrupt_rearrangement")) c.audit_corrupt = r.boolean("audit.corrupt_rearrangement");
  if (r.has("audit.induction")) c.audit_induction = r.boolean("audit.induction");
  if (r.has("audit.tol_quad")) c.audit_tolerance.quad = r.number("audit.tol_quad");
  if (r.has("audit.gradient_band")) c.audit_tolerance.gradient_band = r.number("audit.gradient_band");

  if (r.has("output.dir")) c.output_dir = r.text("output.dir");
  if (r.has("output.prefix")) c.output_prefix = r.text("output.prefix");
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path, overrides);
}

}  // namespace nehari
