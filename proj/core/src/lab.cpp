#include "maxreg/lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "maxreg/counterexample.hpp"
#include "maxreg/error.hpp"
#include "maxreg/evolution.hpp"
#include "maxreg/form_extension.hpp"

namespace maxreg {

namespace {

constexpr double kHolderModulus = 10.0 / 3.0;

std::string tag(Variant v) { return v == Variant::symmetric ? "sym" : "nonsym"; }

std::string fmt(double x) { return format_number(x); }

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::mt19937_64 gen;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  GridFunction complex_vector(const GelfandTriple& sp) {
    Eigen::VectorXcd v(sp.dofs());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(normal(gen), normal(gen));
    return sp.make(std::move(v));
  }
  GridFunction real_vector(const GelfandTriple& sp) {
    Eigen::VectorXcd v(sp.dofs());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(gen);
    return sp.make(std::move(v));
  }
};

double relative_spread(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return (*hi - *lo) / std::max(std::abs(*hi), std::numeric_limits<double>::min());
}

/// Ratios of consecutive per-decade increments over the last three decades.
std::vector<double> last_increment_ratios(const std::vector<double>& inc) {
  std::vector<double> r;
  if (inc.size() < 4) return r;
  for (std::size_t k = inc.size() - 3; k < inc.size(); ++k) r.push_back(inc[k] / inc[k - 1]);
  return r;
}

void add_ratio_checks(Report& rep, const std::string& prefix, const std::vector<double>& increments) {
  const auto ratios = last_increment_ratios(increments);
  if (ratios.empty()) {
    rep.warnings.push_back(prefix + ": fewer than four decades in the sweep, increment ratios not checked");
    return;
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  rep.checks.push_back(check_ge(prefix + "_increment_ratio_min", *lo, 0.8, "last three decades"));
  rep.checks.push_back(check_le(prefix + "_increment_ratio_max", *hi, 1.2, "last three decades"));
}

// ---------------------------------------------------------------- verify-extension

Report verify_extension(const ExperimentConfig& cfg) {
  Report rep;
  const SpacesPtr sp = make_spaces(build_mesh(0.01, cfg.extension_dofs - 1, 2.0), cfg.weight_exp, cfg.mass_model);
  Rng rng(cfg.seed);

  double acc_excess = -INFINITY, acc_min_re = INFINITY, acc_restrict = 0.0;
  double sa_excess = -INFINITY, sa_min_re = INFINITY, sa_max_im = 0.0, sa_restrict = 0.0;
  int degenerate = 0;

  auto restriction_error = [&](const FormOperator& op, const PartialForm& pf) {
    double worst = 0.0;
    const double scale = pf.operator_norm() * sp->norm_V(pf.u0());
    for (int i = 0; i < 100; ++i) {
      const GridFunction v = rng.complex_vector(*sp);
      worst = std::max(worst, std::abs(op(pf.u0(), v) - pf(v)) / (scale * sp->norm_V(v)));
    }
    return worst;
  };

  for (int trial = 0; trial < cfg.extension_trials; ++trial) {
    const bool invariant = trial % 20 == 19;
    const std::uint64_t sample_seed = cfg.seed + 1000 + static_cast<std::uint64_t>(trial);

    // accretive mode
    {
      const GridFunction u0 = rng.complex_vector(*sp);
      GridFunction g = invariant ? Complex(rng.unit(rng.gen) + 0.1, rng.normal(rng.gen)) * u0 : rng.complex_vector(*sp);
      const double t11 = (sp->inner_V(g, u0) / std::pow(sp->norm_V(u0), 2)).real();
      if (t11 < 0.0) g += Complex(-2.0 * t11) * u0;
      const PartialForm pf(sp, u0, g);
      const FormOperator op = extend_accretive(pf);
      degenerate += op.diagnostics().degenerate ? 1 : 0;
      const double bound = op.diagnostics().degenerate ? op.certificate().norm_bound : std::sqrt(2.0) * pf.operator_norm();
      acc_excess = std::max(acc_excess, operator_norm(op) - bound);
      for (const Complex& z : numerical_range_sample(op, cfg.rayleigh_samples, sample_seed).points) {
        acc_min_re = std::min(acc_min_re, z.real());
      }
      acc_restrict = std::max(acc_restrict, restriction_error(op, pf));
    }
    // selfadjoint mode
    {
      const GridFunction u0 = rng.real_vector(*sp);
      GridFunction g = invariant ? Complex(rng.unit(rng.gen) + 0.5) * u0 : rng.real_vector(*sp);
      const double un2 = std::pow(sp->norm_V(u0), 2);
      const double t11 = sp->inner_V(g, u0).real() / un2;
      const double eps_lower = 0.05 + rng.unit(rng.gen);
      if (t11 < eps_lower) g += Complex(eps_lower - t11 + 0.1 * rng.unit(rng.gen)) * u0;
      const PartialForm pf(sp, u0, g);
      const FormOperator op = extend_selfadjoint(pf, ExtensionConfig{ExtensionMode::selfadjoint, eps_lower, {}});
      degenerate += op.diagnostics().degenerate ? 1 : 0;
      const double T = pf.operator_norm();
      const double bound =
          op.diagnostics().degenerate ? op.certificate().norm_bound : std::sqrt(2.0) * (T + T * T / eps_lower);
      sa_excess = std::max(sa_excess, operator_norm(op) - bound);
      for (const Complex& z : numerical_range_sample(op, cfg.rayleigh_samples, sample_seed).points) {
        sa_min_re = std::min(sa_min_re, z.real());
        sa_max_im = std::max(sa_max_im, std::abs(z.imag()));
      }
      sa_restrict = std::max(sa_restrict, restriction_error(op, pf));
    }
  }
  const std::string n = std::to_string(cfg.extension_trials) + " trials";
  rep.checks.push_back(check_le("extension_accretive_norm_excess", acc_excess, 1e-10, "||S^|| - sqrt2 ||T||, " + n));
  rep.checks.push_back(check_ge("extension_accretive_min_re_rayleigh", acc_min_re, -1e-10, n));
  rep.checks.push_back(check_le("extension_accretive_restriction_error", acc_restrict, 1e-10, "relative"));
  rep.checks.push_back(
      check_le("extension_selfadjoint_norm_excess", sa_excess, 1e-10, "||S^|| - sqrt2(||T|| + ||T||^2/eps), " + n));
  rep.checks.push_back(check_ge("extension_selfadjoint_min_re_rayleigh", sa_min_re, -1e-10, n));
  rep.checks.push_back(check_le("extension_selfadjoint_max_im_rayleigh", sa_max_im, 1e-10, n));
  rep.checks.push_back(check_le("extension_selfadjoint_restriction_error", sa_restrict, 1e-10, "relative"));
  rep.warnings.push_back("verify-extension: " + std::to_string(degenerate) + " invariant (T U in U) trials used the trivial extension");
  return rep;
}

// ---------------------------------------------------------------- verify-form

Report verify_form(const ExperimentConfig& cfg) {
  Report rep;
  const MeshPtr mesh = build_mesh(cfg.form_epsilon, cfg.form_cells, cfg.gamma);
  const SpacesPtr sp = make_spaces(mesh, cfg.weight_exp, cfg.mass_model);
  for (Variant var : cfg.variants) {
    const std::string p = "form_" + tag(var);
    const CounterexampleFamily fam(cfg.spec(var), sp);
    Rng rng(cfg.seed + (var == Variant::symmetric ? 7 : 3));
    const std::vector<double> ts = fam.time_sample();
    const int per_t = std::max(1, cfg.rayleigh_samples / static_cast<int>(ts.size()) + 1);
    const double composite = composite_bound(fam.alpha(), fam.M());

    double identity = 0.0, restriction = 0.0, z_orth = 0.0, z_paths = 0.0, asym = 0.0;
    double min_re = INFINITY, max_im = 0.0, max_norm = 0.0, max_cert_excess = -INFINITY, min_z = INFINITY;
    double min_u_lower_gap = INFINITY;
    bool within_target = true;
    std::vector<double> n1s, n2s, uhs, udvs;
    int samples = 0;

    const Eigen::VectorXd mV = sp->grams().gram_V.lumped().diag();
    double c_v_sq = 0.0;
    for (Eigen::Index i = 0; i < mV.size(); ++i) c_v_sq += mV[i] * std::pow(fam.spec().profile(mesh->node(static_cast<int>(i))), 2);

    for (double t : ts) {
      const TrajectoryPoint pt = fam.trajectory(t);
      const PartialForm pf = fam.partial_form_at(t);
      const FormOperator op = fam.assemble_form(t);
      within_target = within_target && op.diagnostics().bound_within_target;
      n1s.push_back(pt.n1);
      n2s.push_back(pt.n2);
      uhs.push_back(pt.norms.u_H);
      udvs.push_back(pt.norms.udot_Vdual);
      min_z = std::min(min_z, pt.n2);
      if (var == Variant::symmetric) {
        const double lower = std::pow(std::abs(fam.shift_d()) - 1.0, 2) * c_v_sq;
        min_u_lower_gap = std::min(min_u_lower_gap, (pt.n1 * pt.n1 - lower) / lower);
      }

      for (int i = 0; i < 100; ++i) {
        const GridFunction v = rng.complex_vector(*sp);
        const Complex a = op(pt.u, v);
        const Complex du = sp->dual_pairing(pt.u_dot, v);
        const Complex uv = sp->inner_H(pt.u, v);
        identity = std::max(identity, std::abs(a + du - uv) / (std::abs(a) + std::abs(du) + std::abs(uv)));
        restriction = std::max(restriction, std::abs(a - pf(v)) / (std::abs(a) + std::abs(pf(v)) + 1e-300));
      }
      z_orth = std::max(z_orth, std::abs(sp->inner_V(pt.z, pt.u)) / (pt.n1 * pt.n2));
      if (op.basis_z() != nullptr) {
        const GridFunction Tu = pf.riesz() - Complex(0.5 * fam.alpha()) * pt.u;
        const GridFunction& e1 = op.basis_u();
        const GridFunction z_gs = Tu - sp->inner_V(Tu, e1) * e1;
        z_paths = std::max(z_paths, sp->norm_V(z_gs - pt.z) / pt.n2);
      }
      asym = std::max(asym, weak_asymmetry(op));
      const double nrm = operator_norm(op);
      max_norm = std::max(max_norm, nrm);
      max_cert_excess = std::max(max_cert_excess, nrm - op.certificate().norm_bound);
      for (const Complex& z : numerical_range_sample(op, per_t, cfg.seed + 17 + static_cast<std::uint64_t>(samples)).points) {
        min_re = std::min(min_re, z.real());
        max_im = std::max(max_im, std::abs(z.imag()));
      }
      samples += per_t;
    }

    const std::string at = std::to_string(ts.size()) + " times";
    rep.checks.push_back(check_le(p + "_defining_identity", identity, 1e-8, "a(u,v) + <udot,v> - (u|v)_H, relative, " + at));
    rep.checks.push_back(check_le(p + "_restriction", restriction, 1e-9, "a(u(t),v) vs b(u(t),v)"));
    rep.checks.push_back(check_le(p + "_z_orthogonality", z_orth, 1e-9, "|(z,u)_V| / (n1 n2)"));
    rep.checks.push_back(check_le(p + "_z_formula_vs_gram_schmidt", z_paths, 1e-9, "relative V-norm"));
    rep.checks.push_back(check_ge(p + "_min_re_rayleigh_minus_half_alpha", min_re - 0.5 * fam.alpha(), -1e-9,
                                  std::to_string(samples) + " samples, alpha=" + fmt(fam.alpha())));
    rep.checks.push_back(check_le(p + "_max_norm_vs_composite", max_norm - composite, 1e-10,
                                  "composite=" + fmt(composite) + ", M=" + fmt(fam.M())));
    rep.checks.push_back(check_le(p + "_certificate_excess", max_cert_excess, 1e-10, "measured - certified"));
    if (var == Variant::symmetric) {
      rep.checks.push_back(check_le(p + "_asymmetry", asym, 1e-12, "||A - A^H||_F / ||A||_F"));
      rep.checks.push_back(check_le(p + "_max_im_rayleigh", max_im, 1e-10, "relative to (w|w)_V"));
      rep.checks.push_back(check_ge(p + "_u_norm_lower_bound_gap", min_u_lower_gap, -1e-12, "(|u|_V^2 - (|d|-1)^2 |c|_V^2) / bound"));
      rep.checks.push_back(check_ge(p + "_min_z_norm", min_z, 1e-12, "z(t) stays away from 0, d=" + fmt(fam.shift_d())));
    } else {
      rep.checks.push_back(check_ge(p + "_asymmetry", asym, 1e-3, "no symmetric extension exists"));
      rep.checks.push_back(check_le(p + "_n1_spread", relative_spread(n1s), 1e-9, "|u(t)|_V"));
      rep.checks.push_back(check_le(p + "_n2_spread", relative_spread(n2s), 1e-9, "|z(t)|_V"));
      rep.checks.push_back(check_le(p + "_uH_spread", relative_spread(uhs), 1e-9, "|u(t)|_H"));
      rep.checks.push_back(check_le(p + "_udot_Vdual_spread", relative_spread(udvs), 1e-9, "|udot(t)|_V'"));
    }
    if (!within_target) rep.warnings.push_back(p + ": |b(t)| exceeded M at some sample time; certificate uses the larger value");
    if (!fam.oscillation_resolved()) {
      rep.warnings.push_back(p + ": mesh does not resolve the phase oscillation (indicator " +
                             fmt(fam.oscillation_indicator()) + " > pi/4); identities are discrete and unaffected");
    }
  }
  return rep;
}

// ---------------------------------------------------------------- conditions

Report conditions(const ExperimentConfig& cfg) {
  Report rep;
  for (Variant var : cfg.variants) {
    const std::string p = "conditions_" + tag(var);
    const CounterexampleSpec spec = cfg.spec(var);
    const ConditionReport cr = verify_conditions(spec, cfg.eps_sweep, cfg.n_cells, cfg.gamma);
    Table t{p, {"epsilon", "v_integral", "vdual_integral", "h_truncated", "increment"}, {}};
    for (std::size_t k = 0; k < cr.rows.size(); ++k) {
      const auto& r = cr.rows[k];
      t.rows.push_back({fmt(r.epsilon), fmt(r.v_integral), fmt(r.vdual_integral), fmt(r.h_truncated),
                        k ? fmt(cr.h_increments[k - 1]) : ""});
    }
    rep.tables.push_back(std::move(t));
    if (cr.rows.empty()) continue;

    const double s2 = spec.profile_scale * spec.profile_scale;
    const double sig2 = spec.phase_scale * spec.phase_scale;
    const double pv = 2.0 * spec.profile_exp - spec.weight_exp + 1.0;
    const double pd = 2.0 * spec.profile_exp - 2.0 * spec.phase_exp + spec.weight_exp + 1.0;
    if (pv > 0.0) {
      rep.checks.push_back(check_le(p + "_V_limit_rel_error", std::abs(cr.V_integral * pv / s2 - 1.0), 0.01,
                                    "limit " + fmt(s2 / pv)));
    } else {
      rep.checks.push_back(check_true(p + "_V_finite", false, "int w|c|^2 diverges at 0"));
    }
    if (pd > 0.0 && sig2 > 0.0) {
      rep.checks.push_back(check_le(p + "_Vdual_limit_rel_error", std::abs(cr.Vdual_integral * pd / (s2 * sig2) - 1.0),
                                    0.01, "limit " + fmt(s2 * sig2 / pd)));
    }
    rep.checks.push_back(check_true(p + "_H_strictly_increasing", cr.h_strictly_increasing));
    add_ratio_checks(rep, p + "_H", cr.h_increments);
    if (var == Variant::symmetric && !cr.h_closed_form) {
      rep.warnings.push_back(p + ": no cosine-integral closed form for these exponents; H uses the period mean");
    }
  }
  return rep;
}

// ---------------------------------------------------------------- holder-fit

Report holder_fit(const ExperimentConfig& cfg) {
  Report rep;
  const SpacesPtr sp = make_spaces(build_mesh(cfg.form_epsilon, cfg.form_cells, cfg.gamma), cfg.weight_exp, cfg.mass_model);
  for (Variant var : cfg.variants) {
    const std::string p = "holder_" + tag(var);
    const CounterexampleFamily fam(cfg.spec(var), sp);
    const auto pairs = holder_pairs(cfg.horizon_T, cfg.holder_deltas, cfg.holder_bases, cfg.seed + 29);
    const HolderReport hr = holder_estimate(fam, pairs);
    Table t{p, {"delta", "form_difference", "trajectory_quotient"}, {}};
    for (const auto& s : hr.samples) t.rows.push_back({fmt(s.delta), fmt(s.form_difference), fmt(s.trajectory_quotient)});
    rep.tables.push_back(std::move(t));
    rep.checks.push_back(check_le(p + "_trajectory_modulus", hr.trajectory_modulus, kHolderModulus + 0.1,
                                  std::to_string(pairs.size()) + " pairs"));
    rep.checks.push_back(check_in(p + "_fitted_exponent", hr.fitted_exponent, 0.45, 0.55,
                                  "K=" + fmt(hr.fitted_constant)));
  }
  return rep;
}

// ---------------------------------------------------------------- mr-divergence

Report divergence(const ExperimentConfig& cfg) {
  Report rep;
  SolverConfig solver;
  solver.theta = cfg.theta;
  RefinementRule rule{cfg.n_cells, cfg.gamma, cfg.solver_min_eps, cfg.solver_cells};
  for (Variant var : cfg.variants) {
    const std::string p = "divergence_" + tag(var);
    const CounterexampleSpec spec = cfg.spec(var);
    Table t{p, {"epsilon", "n_cells", "udot_l2h_sq", "increment"}, {}};
    Table d{p + "_details", {"epsilon", "udot_l2h_sq_quadrature", "solver_udot_l2h_sq", "rhs_l2v"}, {}};
    DivergenceTable dt;
    try {
      dt = mr_divergence(spec, cfg.eps_sweep, rule, solver);
    } catch (const Error& e) {
      rep.checks.push_back(check_true(p + "_strictly_increasing", false, e.what()));
      rep.tables.push_back(std::move(t));
      continue;
    }
    std::vector<double> inc, rhs;
    double worst_solver = 0.0;
    bool any_solver = false;
    for (const auto& r : dt.rows) {
      t.rows.push_back({fmt(r.epsilon), std::to_string(r.n_cells), fmt(r.udot_l2h_sq),
                        r.increment ? fmt(*r.increment) : ""});
      d.rows.push_back({fmt(r.epsilon), fmt(r.udot_l2h_sq_quadrature),
                        r.solver_udot_l2h_sq ? fmt(*r.solver_udot_l2h_sq) : "", fmt(r.rhs_l2v)});
      if (r.increment) inc.push_back(*r.increment);
      rhs.push_back(r.rhs_l2v);
      if (r.solver_udot_l2h_sq) {
        any_solver = true;
        worst_solver = std::max(worst_solver, std::abs(*r.solver_udot_l2h_sq / r.udot_l2h_sq - 1.0));
      }
    }
    rep.tables.push_back(std::move(t));
    rep.tables.push_back(std::move(d));
    if (dt.rows.empty()) continue;
    rep.checks.push_back(check_true(p + "_strictly_increasing", dt.strictly_increasing));
    add_ratio_checks(rep, p, inc);
    rep.checks.push_back(check_le(p + "_rhs_l2v_spread", relative_spread(rhs), 0.05, "(max - min) / max over the sweep"));
    if (any_solver) {
      rep.checks.push_back(check_le(p + "_solver_cross_check", worst_solver, 0.05,
                                    "theta-scheme vs closed form, relative, eps >= " + fmt(cfg.solver_min_eps)));
    }
    const CounterexampleFamily fam(spec, make_spaces(build_mesh(cfg.eps_sweep.front(), 16, cfg.gamma), spec.weight_exp));
    rep.checks.push_back(check_le(p + "_w0_norm", fam.cutoff_solution(0.0).w.coeffs().cwiseAbs().maxCoeff(), 0.0,
                                  "w(0) = cut(0) u(0)"));
  }
  return rep;
}

// ---------------------------------------------------------------- solve

Report solve(const ExperimentConfig& cfg) {
  Report rep;
  SolverConfig solver;
  solver.theta = cfg.theta;
  for (Variant var : cfg.variants) {
    const std::string p = "solve_" + tag(var);
    const CounterexampleSpec spec = cfg.spec(var);

    double worst_margin = INFINITY;
    for (double eps : cfg.energy_eps) {
      const CounterexampleFamily fam(spec, make_spaces(build_mesh(eps, cfg.solver_cells, cfg.gamma), spec.weight_exp, cfg.mass_model));
      const SolveResult res = solve_cutoff_problem(fam, steps_for_epsilon(spec, eps), solver);
      const EnergyCheck ec = energy_inequality_check(
          res, [&](double t) { return fam.cutoff_solution(t).rhs; }, fam.spaces()->zeros(), 0.5 * fam.alpha());
      worst_margin = std::min(worst_margin, ec.margin / ec.rhs);
    }
    if (!cfg.energy_eps.empty()) {
      rep.checks.push_back(check_ge(p + "_energy_margin", worst_margin, 0.0, "min (rhs - lhs) / rhs over energy_eps"));
    }

    Table conv{p + "_convergence", {"level", "n_cells", "n_steps", "l2v_error", "factor"}, {}};
    const int base_steps = steps_for_epsilon(spec, cfg.convergence_epsilon);
    double prev = 0.0, worst_factor = INFINITY;
    for (int l = 0; l < cfg.convergence_levels; ++l) {
      const int n = cfg.convergence_cells << l;
      const int steps = base_steps << l;
      const CounterexampleFamily fam(
          spec, make_spaces(build_mesh(cfg.convergence_epsilon, n, cfg.gamma), spec.weight_exp, cfg.mass_model));
      const SolveResult res = solve_cutoff_problem(fam, steps, solver);
      const double err = l2v_error(res, [&](double t) { return fam.cutoff_solution(t).w; });
      std::string factor;
      if (l > 0) {
        worst_factor = std::min(worst_factor, prev / err);
        factor = fmt(prev / err);
      }
      conv.rows.push_back({std::to_string(l), std::to_string(n), std::to_string(steps), fmt(err), factor});
      prev = err;
    }
    rep.tables.push_back(std::move(conv));
    rep.checks.push_back(check_ge(p + "_convergence_factor", worst_factor, 1.5, "joint (h, dt) halving, L2(V) error"));

    Table resid{p + "_residual", {"n_cells", "max_residual", "oscillation_indicator"}, {}};
    std::vector<double> rs;
    for (int n : cfg.residual_cells) {
      const CounterexampleFamily fam(
          spec, make_spaces(build_mesh(cfg.residual_epsilon, n, cfg.gamma), spec.weight_exp, cfg.mass_model));
      const ResidualReport rr = residual_check(fam, TimeGrid(cfg.horizon_T, cfg.residual_steps), cfg.residual_tests, cfg.seed + 43);
      resid.rows.push_back({std::to_string(n), fmt(rr.max_residual), fmt(rr.oscillation_indicator)});
      rs.push_back(rr.max_residual);
      if (rr.oscillation_flag) rep.warnings.push_back(p + ": residual mesh n=" + std::to_string(n) + " under-resolves the oscillation");
    }
    rep.tables.push_back(std::move(resid));
    bool monotone = true;
    for (std::size_t k = 1; k < rs.size(); ++k) monotone = monotone && rs[k] < rs[k - 1];
    rep.checks.push_back(check_le(p + "_residual_finest", rs.back(), 1e-6, "n=" + std::to_string(cfg.residual_cells.back())));
    rep.checks.push_back(check_true(p + "_residual_decreasing", monotone, std::to_string(rs.size()) + " levels"));
  }
  return rep;
}

using Runner = std::function<Report(const ExperimentConfig&)>;

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"verify-extension", verify_extension}, {"verify-form", verify_form}, {"conditions", conditions},
      {"holder-fit", holder_fit},             {"mr-divergence", divergence}, {"solve", solve},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& lab_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : runners()) n.push_back(name);
    n.push_back("all");
    return n;
  }();
  return names;
}

Report run(const std::string& command, const ExperimentConfig& config) {
  config.validate();
  Report rep;
  rep.command = command;
  rep.config = config.echo();
  bool found = false;
  for (const auto& [name, fn] : runners()) {
    if (command == name || command == "all") {
      rep.append(fn(config));
      found = true;
    }
  }
  if (!found) throw PreconditionError("unknown command '" + command + "'");
  return rep;
}

}  // namespace maxreg
