#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maxreg/error.hpp"
#include "maxreg/evolution.hpp"
#include "maxreg/quadrature.hpp"

using namespace maxreg;

namespace {

CounterexampleSpec make_spec(Variant v) {
  CounterexampleSpec s;
  s.variant = v;
  return s;
}

CounterexampleFamily family(Variant v, double eps, int n) {
  return CounterexampleFamily(make_spec(v), make_spaces(build_mesh(eps, n, 2.0), 1.5));
}

// int_a^b f on uniform panels of width <= h.
template <class F>
double panel_integral(F&& f, double a, double b, double h) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += quadrature::integrate(f, a + (b - a) * k / n, a + (b - a) * (k + 1) / n);
  return s;
}

}  // namespace

TEST_CASE("time grid and solver config") {
  const TimeGrid g(2.0, 4);
  CHECK(g.dt() == 0.5);
  CHECK(g.node(4) == 2.0);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), PreconditionError);
  CHECK_THROWS_AS(TimeGrid(1.0, 1), PreconditionError);
  SolverConfig cfg;
  cfg.theta = 0.3;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "theta");
  }
  cfg.theta = 0.5;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zero data gives the zero trajectory") {
  const auto sp = make_spaces(build_mesh(0.1, 16, 2.0), 1.5);
  const auto res = solve_wacp([&](double) { return FormOperator::scaled_identity(sp, 1.0); },
                              [&](double) { return sp->zeros(); }, sp->zeros(), TimeGrid(1.0, 10), {});
  REQUIRE(res.trajectory.size() == 11);
  for (const auto& u : res.trajectory) CHECK(u.coeffs().norm() == 0.0);
  CHECK(res.norms.u_L2V == 0.0);
}

TEST_CASE("implicit Euler with a scaled identity matches the nodewise recursion") {
  // Lumped Grams are diagonal, so each node decays by 1 / (1 + dt alpha mV_i / mH_i).
  const auto sp = make_spaces(build_mesh(0.05, 20, 2.0), 1.5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Eigen::VectorXcd c(sp->dofs());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = Complex(n(rng), n(rng));
  const GridFunction u0 = sp->make(c);
  const double alpha = 0.7;
  const TimeGrid grid(1.0, 16);
  const auto res = solve_wacp([&](double) { return FormOperator::scaled_identity(sp, alpha); },
                              [&](double) { return sp->zeros(); }, u0, grid, {});
  const Eigen::VectorXd mH = sp->grams().gram_H.diag();
  const Eigen::VectorXd mV = sp->grams().gram_V.diag();
  Eigen::VectorXcd expected = c;
  for (int k = 1; k <= grid.n_steps(); ++k) {
    for (Eigen::Index i = 0; i < c.size(); ++i) expected[i] /= 1.0 + grid.dt() * alpha * mV[i] / mH[i];
    CHECK((res.trajectory[k].coeffs() - expected).norm() <= 1e-12 * c.norm());
    CHECK(sp->norm_H(res.trajectory[k]) < sp->norm_H(res.trajectory[k - 1]));
  }
  const EnergyCheck ec = energy_inequality_check(res, [&](double) { return sp->zeros(); }, u0, alpha);
  CHECK(ec.holds);
  CHECK(ec.margin >= 0.0);
}

TEST_CASE("cutoff problem: first-order convergence, energy inequality, solve residual") {
  for (auto v : {Variant::nonsymmetric, Variant::symmetric}) {
    const auto fam = family(v, 0.1, 32);
    auto exact = [&](double t) { return fam.cutoff_solution(t).w; };
    double prev = 0.0;
    for (int steps : {20, 40, 80, 160}) {
      const SolveResult res = solve_cutoff_problem(fam, steps, {});
      CHECK(res.residual <= 1e-8);
      const double err = l2v_error(res, exact);
      if (prev > 0.0) CHECK(prev / err >= 1.5);
      prev = err;
      const EnergyCheck ec =
          energy_inequality_check(res, [&](double t) { return fam.cutoff_solution(t).rhs; }, fam.spaces()->zeros(),
                                  fam.alpha() / 2);
      CHECK(ec.holds);
    }
    SolverConfig mid;
    mid.theta = 0.5;
    const SolveResult res_mid = solve_cutoff_problem(fam, 160, mid);
    CHECK(l2v_error(res_mid, exact) < prev);
    const EnergyCheck ec =
        energy_inequality_check(res_mid, [&](double t) { return fam.cutoff_solution(t).rhs; }, fam.spaces()->zeros(),
                                fam.alpha() / 2);
    CHECK(ec.holds);
  }
}

TEST_CASE("steps_for_epsilon resolves the phase") {
  CHECK(steps_for_epsilon(make_spec(Variant::nonsymmetric), 1e-2) ==
        static_cast<int>(std::ceil(4000.0 / std::numbers::pi)));
  CHECK(steps_for_epsilon(make_spec(Variant::nonsymmetric), 0.9, 7) == 7);
}

TEST_CASE("oscillatory_power_integral against panel quadrature") {
  for (double q : {1.0, 2.0, 1.5, 3.0}) {
    for (double lambda : {1.0, 2.0}) {
      const double Y = 200.0;
      const double ref = panel_integral([&](double y) { return std::pow(y, -q) * std::sin(lambda * y); }, 1.0, Y, 0.1);
      CHECK(oscillatory_power_integral(q, lambda, Y) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
  // the closed-form branch and the Fourier-quadrature branch meet continuously
  CHECK(oscillatory_power_integral(2.0 + 1e-9, 1.3, 1e4) ==
        doctest::Approx(oscillatory_power_integral(2.0, 1.3, 1e4)).epsilon(1e-7));
  CHECK(oscillatory_power_integral(2.0, 1.0, 0.5) == 0.0);
  CHECK_THROWS_AS(oscillatory_power_integral(0.0, 1.0, 10.0), PreconditionError);
}

TEST_CASE("closed-form |udot|^2 against independent oracles") {
  const auto ns = make_spec(Variant::nonsymmetric);
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    CHECK(udot_l2h_sq_closed_form(ns, eps) == doctest::Approx(0.5 * std::log(1.0 / eps)).epsilon(1e-13));
  }
  // symmetric: int_eps^1 x^-1 (T/4 + (sin(2 phi) - sin(phi)) / (4 phi)) dx, substituted y = x^-3/2
  const auto sy = make_spec(Variant::symmetric);
  for (double eps : {1e-1, 1e-2}) {
    const double Y = std::pow(eps, -1.5);
    const double osc = panel_integral(
        [](double y) { return (std::sin(2.0 * y) - std::sin(y)) / (4.0 * y * y); }, 1.0, Y, 0.05);
    const double oracle = 0.25 * std::log(1.0 / eps) + osc / 1.5;
    CHECK(udot_l2h_sq_closed_form(sy, eps) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("mr_divergence table") {
  const auto ns = make_spec(Variant::nonsymmetric);
  RefinementRule rule;
  rule.n_cells = 512;
  rule.solver_min_eps = 1.0;  // no solver runs
  const DivergenceTable t = mr_divergence(ns, {1e-2, 1e-3, 1e-4}, rule);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.strictly_increasing);
  CHECK_FALSE(t.rows[0].increment.has_value());
  for (std::size_t k = 1; k < 3; ++k) {
    CHECK(*t.rows[k].increment == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-12));
    CHECK(t.rows[k].udot_l2h_sq_quadrature == doctest::Approx(t.rows[k].udot_l2h_sq).epsilon(1e-10));
    CHECK_FALSE(t.rows[k].solver_udot_l2h_sq.has_value());
  }
  // |cut + cut'|^2 integrated against a time-independent |u|_V^2 on a lumped mesh
  CHECK(t.rows[0].rhs_l2v == doctest::Approx(t.rows[1].rhs_l2v).epsilon(0.05));

  const DivergenceTable empty = mr_divergence(ns, {}, rule);
  CHECK(empty.rows.empty());
  CHECK_THROWS_AS(mr_divergence(ns, {1e-3, 1e-2}, rule), PreconditionError);
}

TEST_CASE("mr_divergence solver cross-check at a coarse epsilon") {
  RefinementRule rule;
  rule.n_cells = 256;
  rule.solver_min_eps = 0.1;
  rule.solver_cells = 64;
  const auto t = mr_divergence(make_spec(Variant::symmetric), {0.3, 0.1}, rule);
  for (const auto& row : t.rows) {
    REQUIRE(row.solver_udot_l2h_sq.has_value());
    CHECK(*row.solver_udot_l2h_sq == doctest::Approx(row.udot_l2h_sq).epsilon(0.05));
  }
}

TEST_CASE("residual of the exact trajectory decreases under refinement") {
  double prev = INFINITY;
  for (int n : {256, 512, 1024}) {
    const auto fam = family(Variant::nonsymmetric, 0.1, n);
    const ResidualReport r = residual_check(fam, TimeGrid(1.0, 4), 10, 3);
    CHECK(r.n_cells == n);
    CHECK_FALSE(r.oscillation_flag);
    CHECK(r.max_residual < prev);
    prev = r.max_residual;
  }
  const auto coarse = family(Variant::symmetric, 0.01, 256);
  CHECK(residual_check(coarse, TimeGrid(1.0, 2), 2, 0).oscillation_flag);
  CHECK_THROWS_AS(residual_check(coarse, TimeGrid(1.0, 2), 0, 0), PreconditionError);
}
