#include "maxreg/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include "maxreg/error.hpp"
#include "maxreg/quadrature.hpp"

namespace maxreg {

TimeGrid::TimeGrid(double horizon_T, int n_steps) : T_(horizon_T), n_(n_steps) {
  if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) throw PreconditionError("time grid: horizon_T must be > 0");
  if (n_steps < 2) throw PreconditionError("time grid: n_steps must be >= 2");
}

void SolverConfig::validate() const {
  if (!(theta >= 0.5 && theta <= 1.0)) {
    throw ConfigError("theta", "must lie in [0.5, 1] for unconditional stability");
  }
  if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be > 0");
}

namespace {

double trapezoid_sq_sum(const std::vector<double>& values, double dt) {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = (k == 0 || k + 1 == values.size()) ? 0.5 : 1.0;
    s += w * values[k];
  }
  return s * dt;
}

std::string solve_failure(const GelfandTriple& sp, double dt, double t, const std::string& what) {
  std::ostringstream os;
  os << "theta-scheme linear solve failed at t=" << t << " (eps=" << sp.mesh()->epsilon() << ", dt=" << dt
     << "): " << what;
  return os.str();
}

}  // namespace

SolveResult solve_wacp(const FormProvider& form, const SourceProvider& f, const GridFunction& u0, const TimeGrid& grid,
                       const SolverConfig& cfg) {
  cfg.validate();
  const double dt = grid.dt();
  const double th = cfg.theta;

  SolveResult res;
  res.theta = th;
  res.times.reserve(static_cast<std::size_t>(grid.n_steps()) + 1);
  res.trajectory.reserve(static_cast<std::size_t>(grid.n_steps()) + 1);
  res.times.push_back(0.0);
  res.trajectory.push_back(u0);

  std::optional<double> factored_shift;
  TridiagonalLDLT B;
  for (int k = 0; k < grid.n_steps(); ++k) {
    const double ts = grid.node(k) + th * dt;
    const FormOperator A = form(ts);
    if (!res.spaces) {
      res.spaces = A.spaces();
      require_same_mesh(res.spaces->mesh(), u0.mesh());
    }
    const GelfandTriple& sp = *res.spaces;
    const auto& MH = sp.grams().gram_H;
    if (!factored_shift || *factored_shift != A.alpha_shift()) {
      try {
        B = TridiagonalLDLT(combine(1.0, MH, th * dt * A.alpha_shift(), sp.grams().gram_V));
      } catch (const Error& e) {
        throw Error(solve_failure(sp, dt, ts, e.what()));
      }
      factored_shift = A.alpha_shift();
    }

    const Eigen::VectorXcd& uk = res.trajectory.back().coeffs();
    const GridFunction fk = f(ts);
    require_same_mesh(sp.mesh(), fk.mesh());
    Eigen::VectorXcd rhs = MH.apply(uk) + dt * MH.apply(fk.coeffs());
    if (th < 1.0) rhs -= (1.0 - th) * dt * A.weak_apply(uk);

    Eigen::VectorXcd x = B.solve(rhs);
    if (A.rank() > 0) {
      const Eigen::MatrixXcd& E = A.weak_factor();
      const Eigen::MatrixXcd Y = B.solve(Eigen::MatrixXcd(E));
      const Eigen::MatrixXcd K = th * dt * A.s_matrix();
      const Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(A.rank(), A.rank()) + K * (E.adjoint() * Y);
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(C);
      if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error(solve_failure(sp, dt, ts, "capacitance matrix singular"));
      x -= Y * lu.solve(K * (E.adjoint() * x));
    }
    const Eigen::VectorXcd r = MH.apply(x) + th * dt * A.weak_apply(x) - rhs;
    const double rel = r.norm() / std::max(rhs.norm(), std::numeric_limits<double>::min());
    if (rhs.norm() > 0.0) res.residual = std::max(res.residual, rel);
    if (!std::isfinite(rel) || (rhs.norm() > 0.0 && rel > cfg.tolerance)) {
      throw Error(solve_failure(sp, dt, ts, "relative residual " + std::to_string(rel)));
    }

    res.discrete_derivative.push_back(sp.make((x - uk) / dt));
    res.trajectory.push_back(sp.make(std::move(x)));
    res.times.push_back(grid.node(k + 1));
    res.theta_times.push_back(ts);
  }

  const GelfandTriple& sp = *res.spaces;
  std::vector<double> v_sq;
  for (const auto& u : res.trajectory) {
    v_sq.push_back(std::pow(sp.norm_V(u), 2));
    res.norms.u_LinfH = std::max(res.norms.u_LinfH, sp.norm_H(u));
  }
  res.norms.u_L2V = std::sqrt(trapezoid_sq_sum(v_sq, dt));
  double vd = 0.0, h = 0.0;
  for (const auto& d : res.discrete_derivative) {
    vd += std::pow(sp.norm_Vdual(d), 2);
    h += std::pow(sp.norm_H(d), 2);
  }
  res.norms.udot_L2Vdual = std::sqrt(vd * dt);
  res.norms.udot_L2H = std::sqrt(h * dt);
  return res;
}

EnergyCheck energy_inequality_check(const SolveResult& result, const SourceProvider& f, const GridFunction& u0,
                                    double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("energy check: alpha must be > 0");
  EnergyCheck ec;
  if (!result.spaces || result.discrete_derivative.empty()) {
    ec.holds = true;
    return ec;
  }
  const GelfandTriple& sp = *result.spaces;
  const double th = result.theta;
  double sum_u = 0.0, sum_f = 0.0;
  for (std::size_t k = 0; k + 1 < result.trajectory.size(); ++k) {
    const double dt = result.times[k + 1] - result.times[k];
    const GridFunction um = th * result.trajectory[k + 1] + (1.0 - th) * result.trajectory[k];
    sum_u += dt * std::pow(sp.norm_V(um), 2);
    sum_f += dt * std::pow(sp.norm_Vdual(f(result.theta_times[k])), 2);
  }
  ec.lhs = std::pow(sp.norm_H(result.trajectory.back()), 2) + alpha * sum_u;
  ec.rhs = std::pow(sp.norm_H(u0), 2) + sum_f / alpha;
  ec.margin = ec.rhs - ec.lhs;
  ec.holds = ec.lhs <= ec.rhs * (1.0 + 1e-12);
  return ec;
}

double l2v_error(const SolveResult& result, const std::function<GridFunction(double)>& reference) {
  if (result.trajectory.size() < 2) return 0.0;
  std::vector<double> e;
  for (std::size_t k = 0; k < result.trajectory.size(); ++k) {
    e.push_back(std::pow(result.spaces->norm_V(result.trajectory[k] - reference(result.times[k])), 2));
  }
  return std::sqrt(trapezoid_sq_sum(e, result.times[1] - result.times[0]));
}

SolveResult solve_cutoff_problem(const CounterexampleFamily& family, int n_steps, const SolverConfig& cfg) {
  const TimeGrid grid(family.spec().horizon_T, n_steps);
  return solve_wacp([&](double t) { return family.assemble_form(t); },
                    [&](double t) { return family.cutoff_solution(t).rhs; }, family.spaces()->zeros(), grid, cfg);
}

int steps_for_epsilon(const CounterexampleSpec& spec, double eps, int min_steps) {
  const double T = spec.horizon_T;
  const double phi = spec.phase(eps);
  const double n = std::ceil(4.0 * T * T * phi / std::numbers::pi - 1e-9);
  return std::max(min_steps, static_cast<int>(n));
}

double oscillatory_power_integral(double q, double lambda, double Y) {
  if (!(q > 0.0) || !(lambda > 0.0)) throw PreconditionError("oscillatory integral: need q > 0, lambda > 0");
  if (!(Y > 1.0)) return 0.0;
  gsl_set_error_handler_off();
  if (q == 1.0) {
    return gsl_sf_Si(lambda * Y) - gsl_sf_Si(lambda);
  }
  if (q == 2.0) {
    return std::sin(lambda) - std::sin(lambda * Y) / Y + lambda * (gsl_sf_Ci(lambda * Y) - gsl_sf_Ci(lambda));
  }
  // int_1^inf - int_Y^inf by the Fourier-integral routine
  constexpr std::size_t kLimit = 1000;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(kLimit);
  gsl_integration_workspace* cyc = gsl_integration_workspace_alloc(kLimit);
  gsl_integration_qawo_table* tab = gsl_integration_qawo_table_alloc(lambda, 1.0, GSL_INTEG_SINE, 50);
  auto power = [](double y, void* p) { return std::pow(y, -*static_cast<double*>(p)); };
  gsl_function fn;
  fn.function = +power;
  fn.params = &q;
  double lo = 0.0, hi = 0.0, err = 0.0;
  int s1 = gsl_integration_qawf(&fn, 1.0, 1e-13, kLimit, ws, cyc, tab, &lo, &err);
  int s2 = gsl_integration_qawf(&fn, Y, 1e-13, kLimit, ws, cyc, tab, &hi, &err);
  gsl_integration_qawo_table_free(tab);
  gsl_integration_workspace_free(cyc);
  gsl_integration_workspace_free(ws);
  if (s1 != GSL_SUCCESS || s2 != GSL_SUCCESS) throw Error("oscillatory integral: Fourier quadrature did not converge");
  return lo - hi;
}

namespace {

double power_integral(double p, double eps) {
  if (std::abs(p + 1.0) < 1e-14) return std::log(1.0 / eps);
  return (1.0 - std::pow(eps, p + 1.0)) / (p + 1.0);
}

}  // namespace

double udot_l2h_sq_closed_form(const CounterexampleSpec& spec, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("closed form: need 0 < eps < 1");
  const double T = spec.horizon_T;
  const double sigma = spec.phase_scale;
  const double s = spec.profile_scale;
  const double b = spec.phase_exp;
  const double c = spec.profile_exp;
  const double amp = sigma * sigma * s * s;
  const double base = amp * power_integral(2.0 * c - 2.0 * b, eps);
  if (spec.variant == Variant::nonsymmetric) return 0.5 * T * base;
  if (sigma == 0.0) return 0.0;
  // int_{T/2}^T cos^2(t phi) dt = T/4 + (sin(2 T phi) - sin(T phi)) / (4 phi)
  double osc = 0.0;
  if (b > 0.0) {
    const double q = (2.0 * c + 1.0) / b;
    const double Y = std::pow(eps, -b);
    osc = s * s * sigma / (4.0 * b) *
          (oscillatory_power_integral(q, 2.0 * T * sigma, Y) - oscillatory_power_integral(q, T * sigma, Y));
  } else {
    osc = s * s * sigma / 4.0 * (std::sin(2.0 * T * sigma) - std::sin(T * sigma)) * power_integral(2.0 * c, eps);
  }
  return 0.25 * T * base + osc;
}

namespace {

double udot_l2h_sq_quadrature(const CounterexampleSpec& spec, const Mesh& mesh) {
  const double T = spec.horizon_T;
  return integrate_real(mesh, [&](double x) {
    const double ph = spec.phase(x);
    const double a2 = std::pow(spec.profile(x) * ph, 2);
    if (spec.variant == Variant::nonsymmetric) return 0.5 * T * a2;
    if (ph == 0.0) return 0.0;
    return a2 * (0.25 * T + (std::sin(2.0 * T * ph) - std::sin(T * ph)) / (4.0 * ph));
  });
}

double rhs_l2v(const CounterexampleFamily& family) {
  const double T = family.spec().horizon_T;
  const GelfandTriple& sp = *family.spaces();
  auto integrand = [&](double t) {
    const double g = cutoff(t, T) + cutoff_derivative(t, T);
    return g * g * std::pow(sp.norm_V(family.u(t)), 2);
  };
  constexpr int kPanels = 8;
  double total = 0.0;
  for (int half = 0; half < 2; ++half) {
    for (int p = 0; p < kPanels; ++p) {
      const double lo = 0.5 * T * (half + static_cast<double>(p) / kPanels);
      const double hi = 0.5 * T * (half + static_cast<double>(p + 1) / kPanels);
      total += quadrature::integrate(integrand, lo, hi);
    }
  }
  return std::sqrt(total);
}

}  // namespace

DivergenceTable mr_divergence(const CounterexampleSpec& spec, const std::vector<double>& eps_sequence,
                              const RefinementRule& rule, const SolverConfig& solver) {
  spec.validate();
  solver.validate();
  for (std::size_t k = 1; k < eps_sequence.size(); ++k) {
    if (!(eps_sequence[k] < eps_sequence[k - 1])) throw PreconditionError("mr_divergence: eps must decrease");
  }
  const double T = spec.horizon_T;
  DivergenceTable table;
  for (double eps : eps_sequence) {
    DivergenceRow row;
    row.epsilon = eps;
    row.n_cells = rule.n_cells;
    const MeshPtr mesh = build_mesh(eps, rule.n_cells, rule.gamma);
    row.udot_l2h_sq = udot_l2h_sq_closed_form(spec, eps);
    row.udot_l2h_sq_quadrature = udot_l2h_sq_quadrature(spec, *mesh);
    const CounterexampleFamily family(spec, make_spaces(mesh, spec.weight_exp));
    row.rhs_l2v = rhs_l2v(family);

    if (eps >= rule.solver_min_eps) {
      const CounterexampleFamily coarse(spec, make_spaces(build_mesh(eps, rule.solver_cells, rule.gamma), spec.weight_exp));
      const SolveResult sol = solve_cutoff_problem(coarse, steps_for_epsilon(spec, eps), solver);
      double acc = 0.0;
      for (std::size_t k = 0; k < sol.discrete_derivative.size(); ++k) {
        if (sol.times[k] >= 0.5 * T - 1e-12 * T) {
          acc += (sol.times[k + 1] - sol.times[k]) * std::pow(coarse.spaces()->norm_H(sol.discrete_derivative[k]), 2);
        }
      }
      row.solver_udot_l2h_sq = acc;
    }
    if (!table.rows.empty()) {
      const DivergenceRow& prev = table.rows.back();
      row.increment = (row.udot_l2h_sq - prev.udot_l2h_sq) / std::log10(prev.epsilon / eps);
    }
    table.rows.push_back(row);
  }
  table.strictly_increasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    if (!(table.rows[k].udot_l2h_sq > table.rows[k - 1].udot_l2h_sq)) table.strictly_increasing = false;
  }
  if (!table.strictly_increasing) {
    throw Error("mr_divergence: |udot|^2 is not strictly increasing as eps decreases (under-resolved quadrature)");
  }
  return table;
}

namespace {

/// L_i = int g phi_i over the mesh.
Eigen::VectorXcd load_vector(const Mesh& mesh, const std::function<Complex(double)>& g) {
  Eigen::VectorXcd L = Eigen::VectorXcd::Zero(mesh.dofs());
  for (int j = 0; j < mesh.n_cells(); ++j) {
    const double x0 = mesh.node(j);
    const double x1 = mesh.node(j + 1);
    const double h = x1 - x0;
    L[j] += quadrature::integrate([&](double x) { return g(x) * ((x1 - x) / h); }, x0, x1);
    L[j + 1] += quadrature::integrate([&](double x) { return g(x) * ((x - x0) / h); }, x0, x1);
  }
  return L;
}

}  // namespace

ResidualReport residual_check(const CounterexampleFamily& family, const TimeGrid& grid, int n_test,
                              std::uint64_t seed) {
  if (n_test < 1) throw PreconditionError("residual_check: n_test must be >= 1");
  const GelfandTriple& sp = *family.spaces();
  const Mesh& mesh = *sp.mesh();
  ResidualReport rep;
  rep.n_cells = mesh.n_cells();
  rep.oscillation_indicator = family.oscillation_indicator();
  rep.oscillation_flag = !family.oscillation_resolved();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::VectorXd mV = sp.grams().gram_V.lumped().diag();
  std::vector<GridFunction> tests;
  std::vector<double> test_norms;
  for (int i = 0; i < n_test; ++i) {
    Eigen::VectorXcd v(sp.dofs());
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = Complex(normal(rng), normal(rng)) / std::sqrt(mV[j]);
    tests.push_back(sp.make(std::move(v)));
    test_norms.push_back(sp.norm_V(tests.back()));
  }

  for (int k = 0; k <= grid.n_steps(); ++k) {
    const double t = grid.node(k);
    const GridFunction U = family.u(t);
    const GridFunction Ud = family.u_dot(t);
    const FormOperator A = family.assemble_form(t);
    const Eigen::VectorXcd r = load_vector(mesh, [&](double x) { return family.udot_exact(t, x); }) -
                               load_vector(mesh, [&](double x) { return family.u_exact(t, x); }) +
                               A.weak_apply(U.coeffs());
    const double scale = sp.norm_H(U) + sp.norm_Vdual(Ud);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const double res = std::abs(tests[i].coeffs().dot(r)) / (test_norms[i] * scale);
      rep.max_residual = std::max(rep.max_residual, res);
    }
  }
  return rep;
}

}  // namespace maxreg
