#include <doctest.h>

#include <cmath>
#include <random>

#include "nehari/minimize.hpp"
#include "nehari/random_profile.hpp"
#include "nehari/symmetrize.hpp"

using namespace nehari;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double linf_error(const RadialField& u, double (*f)(double)) {
  double e = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) e = std::max(e, std::abs(u[k] - f(u.grid().r(k))));
  return e;
}

}  // namespace

TEST_CASE("scalar cubic soliton") {
  auto g = make_grid(1, 20.0, 4000);
  Params p = Params::uniform(1, 2.0, {1.0}, {1.0}, 0.0);
  const SolveReport r = solve(p, g, SolverConfig{});
  CHECK(r.converged());
  CHECK(r.level == doctest::Approx(4.0 / 3.0).epsilon(1e-3));
  CHECK(linf_error(r.minimizer[0], [](double x) { return std::sqrt(2.0) * sech(x); }) <= 1e-3);
  CHECK(r.classification.label() == "nontrivial");
  CHECK(r.boundary_value < 1e-6);
}

TEST_CASE("scalar quadratic soliton") {
  auto g = make_grid(1, 20.0, 4000);
  Params p = Params::uniform(1, 1.5, {1.0}, {1.0}, 0.0);
  const SolveReport r = solve(p, g, SolverConfig{});
  CHECK(r.converged());
  CHECK(linf_error(r.minimizer[0], [](double x) { return 1.5 * std::pow(sech(x / 2.0), 2); }) <= 1e-3);
}

TEST_CASE("scalar level scaling laws") {
  auto g = make_grid(1, 20.0, 2000);
  SolverConfig cfg;
  SUBCASE("mu") {
    for (double q : {1.5, 2.0}) {
      const double c1 = scalar_level(Params::uniform(1, q, {1.0}, {1.0}, 0.0), 0, g, cfg);
      const double c2 = scalar_level(Params::uniform(1, q, {1.0}, {2.0}, 0.0), 0, g, cfg);
      CHECK(c2 == doctest::Approx(std::pow(2.0, -1.0 / (q - 1.0)) * c1).epsilon(1e-3));
    }
  }
  SUBCASE("lambda") {
    // u -> lambda^{1/(2q-2)} u(sqrt(lambda) x) gives c(lambda) = lambda^{1/(q-1) + 1 - n/2} c(1)
    const double c1 = scalar_level(Params::uniform(1, 2.0, {1.0}, {1.0}, 0.0), 0, g, cfg);
    const double c2 = scalar_level(Params::uniform(1, 2.0, {2.0}, {1.0}, 0.0), 0, g, cfg);
    CHECK(c2 == doctest::Approx(std::pow(2.0, 1.5) * c1).epsilon(1e-3));
  }
}

TEST_CASE("report invariants on a coupled system") {
  auto g = make_grid(2, 15.0, 800);
  Params p = Params::uniform(2, 1.5, {1.0, 2.0}, {1.0, 1.5}, 0.3);
  SolverConfig cfg;
  const SolveReport r = solve(p, g, cfg);
  REQUIRE(r.converged());
  CHECK(r.classification.nontrivial());
  CHECK(r.positive_at_origin());
  CHECK(std::abs(r.energy.tau) <= 1e-6 * r.energy.quadratic);
  CHECK(l2_norm(gradient(p, r.minimizer)) <= 10.0 * cfg.tol_residual);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(is_nonincreasing(r.minimizer[i]));
    CHECK(r.minimizer[i][0] > 0.0);
  }
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    CHECK(r.trace[k].energy <= r.trace[k - 1].energy * (1.0 + 1e-12));
}

TEST_CASE("q < 2: small coupling still gives a nontrivial ground state") {
  auto g = make_grid(1, 20.0, 1000);
  for (double b : {1e-3, 0.05, 1.0}) {
    Params p = Params::uniform(1, 1.5, {1.0, 4.0}, {1.0, 1.0}, b);
    const SolveReport r = solve(p, g, SolverConfig{});
    CHECK(r.converged());
    CHECK(r.classification.nontrivial());
    CHECK(r.positive_at_origin());
  }
}

TEST_CASE("q = 2: semitrivial below the stability threshold, nontrivial above") {
  auto g = make_grid(1, 20.0, 1000);
  Params p = Params::uniform(1, 2.0, {1.0, 4.0}, {1.0, 1.0}, 0.5);
  SolveReport r = solve(p, g, SolverConfig{});
  CHECK(r.classification.label() == "semitrivial(2)");
  CHECK(r.level == doctest::Approx(4.0 / 3.0).epsilon(1e-3));
  p.set_coupling(0, 1, 5.0);
  r = solve(p, g, SolverConfig{});
  CHECK(r.classification.nontrivial());
  CHECK(r.level < 4.0 / 3.0);
}

TEST_CASE("subsystems") {
  auto g = make_grid(3, 12.0, 600);
  Params p = Params::uniform(3, 1.5, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.2);
  SolverConfig cfg;
  const SolveReport single = subsystem_solve(p, {1}, g, cfg);
  CHECK(single.level == doctest::Approx(scalar_level(p, 1, g, cfg)).epsilon(1e-10));
  CHECK(single.components == std::vector<std::size_t>{1});
  double lv[3];
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != k) idx.push_back(i);
    lv[k] = subsystem_solve(p, idx, g, cfg).level;
  }
  CHECK(lv[1] == doctest::Approx(lv[0]).epsilon(1e-4));
  CHECK(lv[2] == doctest::Approx(lv[0]).epsilon(1e-4));
  CHECK_THROWS_AS(subsystem_solve(p, {}, g, cfg), std::invalid_argument);
  CHECK_THROWS_AS(subsystem_solve(p, {0, 1, 2}, g, cfg), std::invalid_argument);
  CHECK_THROWS_AS(subsystem_solve(p, {0, 0}, g, cfg), std::invalid_argument);
  CHECK_THROWS_AS(subsystem_solve(p, {5}, g, cfg), std::out_of_range);
}

TEST_CASE("equal-level minimizers are reported as alternates") {
  auto g = make_grid(3, 12.0, 600);
  Params p = Params::uniform(3, 1.5, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.2);
  const SolveReport r = solve(p, g, SolverConfig{});
  REQUIRE(r.converged());
  REQUIRE(!r.alternates.empty());
  for (const FieldVector& alt : r.alternates) {
    const double level = evaluate(p, alt).I;
    CHECK(level == doctest::Approx(r.level).epsilon(1e-8));
    double diff = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      diff = std::max(diff, (alt[i] - r.minimizer[i]).max_abs());
    CHECK(diff > 1e-3 * r.minimizer[0].max_abs());
  }
}

TEST_CASE("fixed seed gives bit-identical reports, independent of worker count") {
  auto g = make_grid(2, 12.0, 400);
  Params p = Params::uniform(2, 1.7, {1.0, 2.0, 0.7}, {1.0, 2.0, 1.0}, 0.4);
  SolverConfig a;
  a.multistart = 6;
  SolverConfig b = a;
  b.workers = 4;
  const SolveReport r1 = solve(p, g, a), r2 = solve(p, g, a), r3 = solve(p, g, b);
  for (const SolveReport* r : {&r2, &r3}) {
    CHECK(r->level == r1.level);
    CHECK(r->start_index == r1.start_index);
    CHECK(r->iterations == r1.iterations);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < g->size(); ++k) CHECK(r->minimizer[i][k] == r1.minimizer[i][k]);
  }
}

TEST_CASE("rearrangement does not raise the projected energy") {
  std::mt19937_64 gen(31);
  for (int s = 0; s < 30; ++s) {
    const int n = 1 + s % 3;
    auto g = make_grid(n, 10.0, 1000);
    Params p = Params::uniform(n, 1.5, {1.0, 2.0}, {1.0, 1.0}, 0.5);
    const FieldVector u = sample_all(random_profiles(gen, g->radius(), 2, s % 2 == 0), g);
    const double before = projected_energy(p, evaluate(p, u));
    const double after = projected_energy(p, evaluate(p, rearrange(u)));
    CHECK(after <= before * (1.0 + 1e-6) + 1e-2 * g->h() * before);
  }
}

TEST_CASE("classification") {
  using K = Classification::Kind;
  CHECK(classify({0.0, 0.0}, {0.0, 0.0}, 1e-6, 1e-3).kind == K::Zero);
  CHECK(classify({1.0, 2.0}, {1.0, 1.0}, 1e-6, 1e-3).kind == K::Nontrivial);
  const Classification s = classify({1.0, 0.0}, {1.0, 0.0}, 1e-6, 1e-3);
  CHECK(s.kind == K::Semitrivial);
  CHECK(s.label() == "semitrivial(2)");
  // tiny but balanced: a genuine small component, not a null one
  CHECK(classify({1.0, 1e-12}, {1.0, 1.0}, 1e-6, 1e-3).kind == K::Nontrivial);
  // tiny and draining
  CHECK(classify({1.0, 1e-12}, {1.0, 0.4}, 1e-6, 1e-3).kind == K::Semitrivial);
  CHECK(classify({0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}, 1e-6, 1e-3).label() == "semitrivial(1 3)");
}

TEST_CASE("solver input validation") {
  auto g = make_grid(1, 10.0, 100);
  Params p = Params::uniform(1, 2.0, {1.0}, {1.0}, 0.0);
  CHECK_THROWS_AS(solve(p, g, SolverConfig{}, FieldVector(g, 1)), ProjectionError);
  CHECK_THROWS_AS(solve(p, g, SolverConfig{}, FieldVector(g, 2)), std::invalid_argument);
  SolverConfig bad;
  bad.tol_residual = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolverConfig{};
  bad.armijo_factor = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolverConfig{};
  bad.max_iter = 3;
  const SolveReport r = solve(Params::uniform(1, 1.5, {1.0}, {1.0}, 0.0), g, bad);
  CHECK(r.status == SolveStatus::MaxIterations);
  CHECK(to_string(r.status) == "max_iterations");
}

TEST_CASE("default radius and gaussian start") {
  Params p = Params::uniform(1, 1.5, {4.0, 0.25}, {1.0, 1.0}, 0.1);
  CHECK(default_radius(p) == doctest::Approx(40.0));
  auto g = make_grid(2, 10.0, 400);
  CHECK(lp_norm(gaussian_profile(g, 1.0, 1.5), 3.0) == doctest::Approx(1.0).epsilon(1e-12));
}
