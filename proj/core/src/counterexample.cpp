#include "maxreg/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include "maxreg/error.hpp"
#include "maxreg/quadrature.hpp"

namespace maxreg {

namespace {

constexpr int kDenseSamples = 201;
constexpr double kSymmetricBoundMargin = 1.01;

Eigen::VectorXd lumped_masses(const SymTridiagonal& gram) { return gram.lumped().diag(); }

}  // namespace

std::string to_string(Variant v) { return v == Variant::symmetric ? "symmetric" : "nonsymmetric"; }

Variant parse_variant(const std::string& name) {
  if (name == "nonsymmetric") return Variant::nonsymmetric;
  if (name == "symmetric") return Variant::symmetric;
  throw ConfigError("variant", "expected 'nonsymmetric' or 'symmetric', got '" + name + "'");
}

void CounterexampleSpec::validate() const {
  if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) throw PreconditionError("horizon_T must be > 0");
  if (weight_exp < 0.0 || phase_exp < 0.0 || profile_exp < 0.0) {
    throw PreconditionError("weight, phase and profile exponents must be >= 0");
  }
  if (!(profile_scale > 0.0)) throw PreconditionError("profile_scale must be > 0");
  if (phase_scale < 0.0) throw PreconditionError("phase_scale must be >= 0");
  if (variant == Variant::symmetric && shift_d && !(std::abs(*shift_d) > 1.0)) {
    throw PreconditionError("symmetric variant requires |shift_d| > 1");
  }
  if (alpha && !(*alpha > 0.0)) throw PreconditionError("alpha must be > 0");
  if (M && !(*M > 0.0)) throw PreconditionError("M must be > 0");
  if (k_term && !(*k_term >= 0.0)) throw PreconditionError("k_term must be >= 0");
}

double cutoff(double t, double T) {
  if (t >= 0.5 * T) return 1.0;
  if (t <= 0.0) return 0.0;
  const double s = std::sin(std::numbers::pi * t / T);
  return s * s;
}

double cutoff_derivative(double t, double T) {
  if (t >= 0.5 * T || t <= 0.0) return 0.0;
  return std::numbers::pi / T * std::sin(2.0 * std::numbers::pi * t / T);
}

CounterexampleFamily::CounterexampleFamily(CounterexampleSpec spec, SpacesPtr spaces)
    : spec_(std::move(spec)), spaces_(std::move(spaces)) {
  spec_.validate();
  if (!spaces_) throw PreconditionError("counterexample: null spaces");
  if (spaces_->v_exponent() != spec_.weight_exp) {
    throw PreconditionError("counterexample: V weight exponent of the spaces differs from weight_exp");
  }
  const Mesh& mesh = *spaces_->mesh();
  const double T = spec_.horizon_T;

  for (int j = 0; j < mesh.n_cells(); ++j) {
    const double x = mesh.node(j);
    const double dphi = spec_.phase_exp * spec_.phase_scale * std::pow(x, -spec_.phase_exp - 1.0);
    oscillation_indicator_ = std::max(oscillation_indicator_, T * dphi * mesh.cell_length(j));
  }
  resolved_ = oscillation_indicator_ <= std::numbers::pi / 4.0;

  if (spec_.variant == Variant::symmetric) d_ = spec_.shift_d.value_or(choose_d(spec_));

  std::vector<double> dense(kDenseSamples);
  for (int k = 0; k < kDenseSamples; ++k) dense[k] = T * k / (kDenseSamples - 1);

  if (spec_.alpha) {
    alpha_ = *spec_.alpha;
  } else if (spec_.variant == Variant::symmetric && spaces_->mass_model() == MassModel::lumped) {
    // Re b(u,u) >= sum_i mH_i c_i^2 ((|d|-1)^2 - |phi_i|(|d|+1)) and |u|_V^2 <= (|d|+1)^2 sum_i mV_i c_i^2.
    const Eigen::VectorXd mH = lumped_masses(spaces_->grams().gram_H);
    const Eigen::VectorXd mV = lumped_masses(spaces_->grams().gram_V);
    const double ad = std::abs(d_);
    double lower = 0.0, vsum = 0.0;
    for (Eigen::Index i = 0; i < mH.size(); ++i) {
      const double x = mesh.node(static_cast<int>(i));
      const double c2 = std::pow(spec_.profile(x), 2);
      lower += mH[i] * c2 * ((ad - 1.0) * (ad - 1.0) - std::abs(spec_.phase(x)) * (ad + 1.0));
      vsum += mV[i] * c2;
    }
    alpha_ = lower / ((ad + 1.0) * (ad + 1.0) * vsum);
  } else {
    alpha_ = std::numeric_limits<double>::infinity();
    for (double t : dense) {
      const GridFunction U = u(t);
      const Complex b = spaces_->inner_H(U - u_dot(t), U);
      alpha_ = std::min(alpha_, b.real() / std::pow(spaces_->norm_V(U), 2));
    }
  }
  if (!(alpha_ > 0.0)) {
    throw PreconditionError("counterexample: partial forms are not coercive (alpha <= 0); increase |shift_d|");
  }

  if (spec_.M) {
    M_ = *spec_.M;
  } else {
    for (double t : dense) M_ = std::max(M_, partial_form_at(t).operator_norm());
    if (spec_.variant == Variant::symmetric) M_ *= kSymmetricBoundMargin;
  }
  if (spec_.variant == Variant::symmetric) {
    const double m = M_ + 0.5 * alpha_;
    k_term_ = spec_.k_term.value_or(2.0 / alpha_ * m * m);
  }
}

void CounterexampleFamily::check_time(double t) const {
  const double T = spec_.horizon_T;
  if (!(t >= -1e-12 * T && t <= T * (1.0 + 1e-12))) throw PreconditionError("time outside [0, horizon_T]");
}

Complex CounterexampleFamily::u_exact(double t, double x) const {
  const double c = spec_.profile(x);
  const double arg = t * spec_.phase(x);
  if (spec_.variant == Variant::nonsymmetric) return c * std::polar(1.0, arg);
  return c * (std::sin(arg) + d_);
}

Complex CounterexampleFamily::udot_exact(double t, double x) const {
  const double c = spec_.profile(x);
  const double ph = spec_.phase(x);
  const double arg = t * ph;
  if (spec_.variant == Variant::nonsymmetric) return Complex(0.0, ph * c) * std::polar(1.0, arg);
  return c * ph * std::cos(arg);
}

GridFunction CounterexampleFamily::u(double t) const {
  check_time(t);
  return interpolate([&](double x) { return u_exact(t, x); }, spaces_->mesh());
}

GridFunction CounterexampleFamily::u_dot(double t) const {
  check_time(t);
  return interpolate([&](double x) { return udot_exact(t, x); }, spaces_->mesh());
}

PartialForm CounterexampleFamily::partial_form_at(double t) const {
  GridFunction U = u(t);
  const Eigen::VectorXcd functional = spaces_->grams().gram_H.apply((U - u_dot(t)).coeffs());
  GridFunction g = riesz_map(*spaces_, functional);
  return PartialForm(spaces_, std::move(U), std::move(g));
}

GridFunction CounterexampleFamily::compute_z(double t) const {
  const GridFunction U = u(t);
  const GridFunction Ud = u_dot(t);
  const auto& G = spaces_->grams();
  const GridFunction R = spaces_->make(spaces_->solve_V(G.gram_H.apply((U - Ud).coeffs())));
  const Complex num = std::pow(spaces_->norm_H(U), 2) - spaces_->dual_pairing(Ud, U);
  return R - (num / std::pow(spaces_->norm_V(U), 2)) * U;
}

TrajectoryPoint CounterexampleFamily::trajectory(double t) const {
  TrajectoryPoint p;
  p.t = t;
  p.u = u(t);
  p.u_dot = u_dot(t);
  p.z = compute_z(t);
  p.n1 = spaces_->norm_V(p.u);
  p.n2 = spaces_->norm_V(p.z);
  const GridFunction Tu = partial_form_at(t).riesz() - Complex(0.5 * alpha_) * p.u;
  p.z_degenerate = p.n2 <= 1e-12 * spaces_->norm_V(Tu);
  p.norms.u_H = spaces_->norm_H(p.u);
  p.norms.u_V = p.n1;
  p.norms.udot_H_truncated = spaces_->norm_H(p.u_dot);
  p.norms.udot_Vdual = spaces_->norm_Vdual(p.u_dot);
  return p;
}

FormOperator CounterexampleFamily::assemble_form(double t) const {
  const PartialForm pf = partial_form_at(t);
  if (spec_.variant == Variant::nonsymmetric) return extend_form(pf, alpha_, M_, ExtensionMode::accretive);
  return extend_form(pf, alpha_, M_, ExtensionMode::selfadjoint, k_term_);
}

CutoffSolution CounterexampleFamily::cutoff_solution(double t) const {
  const GridFunction U = u(t);
  const double T = spec_.horizon_T;
  return {cutoff(t, T) * U, (cutoff(t, T) + cutoff_derivative(t, T)) * U};
}

std::vector<double> CounterexampleFamily::time_sample() const {
  const double T = spec_.horizon_T;
  constexpr int kCheb = 20;
  std::vector<double> ts{0.0};
  for (int k = kCheb - 1; k >= 0; --k) {
    ts.push_back(0.5 * T * (1.0 + std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * kCheb))));
  }
  ts.push_back(T);
  return ts;
}

CoercivityIntegrals coercivity_integrals(const CounterexampleSpec& spec) {
  auto both = [&](double lo) {
    CoercivityIntegrals r;
    r.profile_sq = quadrature::integrate([&](double x) { return std::pow(spec.profile(x), 2); }, lo, 1.0);
    r.profile_sq_phase = quadrature::integrate(
        [&](double x) { return std::pow(spec.profile(x), 2) * std::abs(spec.phase(x)); }, lo, 1.0);
    return r;
  };
  const CoercivityIntegrals coarse = both(1e-12);
  const CoercivityIntegrals fine = both(1e-14);
  auto converged = [](double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(std::abs(b), 1e-300); };
  if (!converged(coarse.profile_sq, fine.profile_sq)) {
    throw PreconditionError("int |c|^2 does not converge at 0; check profile_exp");
  }
  if (fine.profile_sq_phase != 0.0 && !converged(coarse.profile_sq_phase, fine.profile_sq_phase)) {
    throw PreconditionError("int |c|^2 |phi| does not converge at 0; check phase_exp and profile_exp");
  }
  return fine;
}

double choose_d(const CounterexampleSpec& spec) {
  const CoercivityIntegrals I = coercivity_integrals(spec);
  const double i0 = I.profile_sq;
  const double i1 = I.profile_sq_phase;
  auto margin = [&](long k) {
    const double d = k / 1000.0;
    return (d - 1.0) * (d - 1.0) * i0 - (d + 1.0) * i1 - 0.1 * i0;
  };
  // larger root of i0 d^2 - (2 i0 + i1) d + (0.9 i0 - i1) = 0
  const double p = 2.0 * i0 + i1;
  const double root = (p + std::sqrt(p * p - 4.0 * i0 * (0.9 * i0 - i1))) / (2.0 * i0);
  long k = std::max(1001L, static_cast<long>(std::ceil(root * 1000.0)));
  while (margin(k) < 0.0) ++k;
  while (k > 1001 && margin(k - 1) >= 0.0) --k;
  return k / 1000.0;
}

double log_cos_sq_integral(double eps, double t, double b) {
  if (!(eps > 0.0 && eps < 1.0) || !(t > 0.0) || !(b > 0.0)) {
    throw PreconditionError("log_cos_sq_integral: need 0 < eps < 1, t > 0, b > 0");
  }
  gsl_set_error_handler_off();
  gsl_sf_result hi, lo;
  if (gsl_sf_Ci_e(2.0 * t * std::pow(eps, -b), &hi) != GSL_SUCCESS || gsl_sf_Ci_e(2.0 * t, &lo) != GSL_SUCCESS) {
    throw Error("cosine integral evaluation failed");
  }
  return 0.5 * std::log(1.0 / eps) + (hi.val - lo.val) / (2.0 * b);
}

ConditionReport verify_conditions(const CounterexampleSpec& spec, const std::vector<double>& eps_sequence,
                                  int n_cells, double gamma) {
  spec.validate();
  for (std::size_t k = 1; k < eps_sequence.size(); ++k) {
    if (!(eps_sequence[k] < eps_sequence[k - 1])) throw PreconditionError("eps sequence must be decreasing");
  }
  ConditionReport rep;
  rep.h_time = spec.horizon_T;
  const double a = spec.weight_exp;
  const double p = 2.0 * spec.profile_exp - 2.0 * spec.phase_exp;
  rep.h_closed_form = spec.variant == Variant::symmetric && std::abs(p + 1.0) < 1e-12 && spec.phase_scale > 0.0;

  for (double eps : eps_sequence) {
    const MeshPtr mesh = build_mesh(eps, n_cells, gamma);
    ConditionRow row;
    row.epsilon = eps;
    row.v_integral = integrate_real(*mesh, [&](double x) { return spec.weight(x) * std::pow(spec.profile(x), 2); });
    row.vdual_integral = integrate_real(
        *mesh, [&](double x) { return std::pow(x, a) * std::pow(spec.phase(x) * spec.profile(x), 2); });
    const double h_full = integrate_real(*mesh, [&](double x) { return std::pow(spec.phase(x) * spec.profile(x), 2); });
    if (spec.variant == Variant::nonsymmetric) {
      row.h_truncated = h_full;
    } else if (rep.h_closed_form) {
      const double amp = std::pow(spec.phase_scale * spec.profile_scale, 2);
      row.h_truncated = amp * log_cos_sq_integral(eps, rep.h_time * spec.phase_scale, spec.phase_exp);
    } else {
      row.h_truncated = 0.5 * h_full;  // mean of cos^2 over a period
    }
    rep.rows.push_back(row);
  }

  const auto n = rep.rows.size();
  if (n > 0) {
    rep.V_integral = rep.rows.back().v_integral;
    rep.Vdual_integral = rep.rows.back().vdual_integral;
  }
  auto settled = [&](auto field) {
    if (n < 2) return std::isfinite(n ? field(rep.rows.back()) : 0.0);
    const double last = field(rep.rows[n - 1]);
    const double prev = field(rep.rows[n - 2]);
    return std::isfinite(last) && std::abs(last - prev) <= 1e-3 * std::abs(last);
  };
  rep.v_finite = settled([](const ConditionRow& r) { return r.v_integral; });
  rep.vdual_finite = settled([](const ConditionRow& r) { return r.vdual_integral; });
  rep.h_strictly_increasing = n >= 2;
  for (std::size_t k = 1; k < n; ++k) {
    const double dh = rep.rows[k].h_truncated - rep.rows[k - 1].h_truncated;
    rep.h_strictly_increasing = rep.h_strictly_increasing && dh > 0.0;
    rep.h_increments.push_back(dh / std::log10(rep.rows[k - 1].epsilon / rep.rows[k].epsilon));
  }
  return rep;
}

std::vector<HolderPair> holder_pairs(double horizon_T, int n_delta, int n_base, std::uint64_t seed) {
  if (n_delta < 2 || n_base < 1) throw PreconditionError("holder_pairs: need n_delta >= 2 and n_base >= 1");
  std::mt19937_64 rng(seed);
  std::vector<HolderPair> pairs;
  for (int k = 0; k < n_delta; ++k) {
    const double delta = horizon_T * std::pow(10.0, -5.0 + 4.0 * k / (n_delta - 1));
    std::uniform_real_distribution<double> base(0.0, horizon_T - delta);
    for (int j = 0; j < n_base; ++j) {
      const double s = base(rng);
      pairs.push_back({s, s + delta});
    }
  }
  return pairs;
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("loglog_fit: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw PreconditionError("loglog_fit: x values are all equal");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

HolderReport holder_estimate(const CounterexampleFamily& family, const std::vector<HolderPair>& pairs) {
  if (pairs.size() < 20) throw PreconditionError("holder_estimate: need >= 20 pairs");
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (const auto& pr : pairs) {
    const double d = std::abs(pr.t - pr.s);
    if (d > 0.0) dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (!(dmax >= 1000.0 * dmin)) throw PreconditionError("holder_estimate: pairs must span >= 3 decades of |t-s|");

  const GelfandTriple& sp = *family.spaces();
  HolderReport rep;
  std::vector<double> xs, ys;
  for (const auto& pr : pairs) {
    HolderSample smp;
    smp.delta = std::abs(pr.t - pr.s);
    if (smp.delta > 0.0) {
      smp.form_difference = operator_difference_norm(family.assemble_form(pr.t), family.assemble_form(pr.s));
      smp.trajectory_quotient = std::pow(sp.norm_V(family.u(pr.t) - family.u(pr.s)), 2) / smp.delta;
      rep.trajectory_modulus = std::max(rep.trajectory_modulus, smp.trajectory_quotient);
      if (smp.form_difference > 0.0) {
        xs.push_back(smp.delta);
        ys.push_back(smp.form_difference);
      }
    }
    rep.samples.push_back(smp);
  }
  if (xs.size() >= 2) {
    const LineFit fit = loglog_fit(xs, ys);
    rep.fitted_exponent = fit.slope;
    rep.fitted_constant = std::exp(fit.intercept);
  }
  return rep;
}

}  // namespace maxreg
