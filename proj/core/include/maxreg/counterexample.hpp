#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxreg/form_extension.hpp"
#include "maxreg/weighted_spaces.hpp"

namespace maxreg {

enum class Variant { nonsymmetric, symmetric };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// Trajectory family on (0,1] with w = x^-a, phi = phase_scale x^-b, c = profile_scale x^c.
///   nonsymmetric: u(t,x) = c(x) exp(i t phi(x))
///   symmetric:    u(t,x) = c(x) (sin(t phi(x)) + d)
struct CounterexampleSpec {
  Variant variant = Variant::nonsymmetric;
  double weight_exp = 1.5;
  double phase_exp = 1.5;
  double profile_exp = 1.0;
  double phase_scale = 1.0;
  double profile_scale = 1.0;
  std::optional<double> shift_d;  // symmetric only; chosen by choose_d when empty
  double horizon_T = 1.0;
  std::optional<double> alpha;    // target coercivity; measured when empty
  std::optional<double> M;        // target bound; measured when empty
  std::optional<double> k_term;   // symmetric only; 2 alpha^-1 (M + alpha/2)^2 when empty

  /// Throws PreconditionError on invalid fields.
  void validate() const;

  double weight(double x) const { return std::pow(x, -weight_exp); }
  double phase(double x) const { return phase_scale * std::pow(x, -phase_exp); }
  double profile(double x) const { return profile_scale * std::pow(x, profile_exp); }
};

struct TrajectoryNorms {
  double u_H = 0.0;
  double u_V = 0.0;
  double udot_H_truncated = 0.0;
  double udot_Vdual = 0.0;
};

struct TrajectoryPoint {
  double t = 0.0;
  GridFunction u;
  GridFunction u_dot;
  GridFunction z;
  double n1 = 0.0;  // ||u(t)||_V
  double n2 = 0.0;  // ||z(t)||_V
  bool z_degenerate = false;
  TrajectoryNorms norms;
};

struct CutoffSolution {
  GridFunction w;
  GridFunction rhs;
};

double cutoff(double t, double T);
double cutoff_derivative(double t, double T);

/// The counterexample on one mesh, with alpha, M, d and the symmetric K term resolved once.
class CounterexampleFamily {
 public:
  CounterexampleFamily(CounterexampleSpec spec, SpacesPtr spaces);

  const CounterexampleSpec& spec() const noexcept { return spec_; }
  const SpacesPtr& spaces() const noexcept { return spaces_; }
  double shift_d() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }
  double M() const noexcept { return M_; }
  double k_term() const noexcept { return k_term_; }

  /// max_j T |phi'(x_j)| h_j <= pi/4; only a warning when false.
  bool oscillation_resolved() const noexcept { return resolved_; }
  double oscillation_indicator() const noexcept { return oscillation_indicator_; }

  Complex u_exact(double t, double x) const;
  Complex udot_exact(double t, double x) const;
  GridFunction u(double t) const;
  GridFunction u_dot(double t) const;

  TrajectoryPoint trajectory(double t) const;
  PartialForm partial_form_at(double t) const;

  /// z(t) = R(u - udot) - ((|u|_H^2 - <udot,u>) / |u|_V^2) u with R = Gram_V^-1 Gram_H,
  /// the discrete counterpart of w^-1. Does not depend on the alpha/2 shift.
  GridFunction compute_z(double t) const;

  FormOperator assemble_form(double t) const;
  CutoffSolution cutoff_solution(double t) const;

  /// 20 Chebyshev points on [0, T] plus both endpoints, ascending.
  std::vector<double> time_sample() const;

 private:
  void check_time(double t) const;

  CounterexampleSpec spec_;
  SpacesPtr spaces_;
  double d_ = 0.0;
  double alpha_ = 0.0;
  double M_ = 0.0;
  double k_term_ = 0.0;
  bool resolved_ = true;
  double oscillation_indicator_ = 0.0;
};

/// int_lo^1 profile^2 dx and int_lo^1 profile^2 |phase| dx, checked for convergence as lo -> 0.
struct CoercivityIntegrals {
  double profile_sq = 0.0;
  double profile_sq_phase = 0.0;
};
CoercivityIntegrals coercivity_integrals(const CounterexampleSpec& spec);

/// Smallest d > 1 on a 1e-3 grid with (d-1)^2 I0 - (d+1) I1 >= 0.1 I0.
double choose_d(const CounterexampleSpec& spec);

struct ConditionRow {
  double epsilon = 0.0;
  double v_integral = 0.0;       // int_eps^1 w |c|^2
  double vdual_integral = 0.0;   // int_eps^1 w^-1 |phi c|^2
  double h_truncated = 0.0;      // int_eps^1 |phi c|^2, times cos^2(t phi) for the symmetric variant
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  double V_integral = 0.0;
  double Vdual_integral = 0.0;
  double h_time = 0.0;                // fixed t for the symmetric H integral
  bool h_closed_form = false;         // symmetric H evaluated through the cosine integral
  std::vector<double> h_increments;   // per decade of epsilon, between consecutive rows
  bool v_finite = false;
  bool vdual_finite = false;
  bool h_strictly_increasing = false;
};

/// Rows for each epsilon (decreasing), integrals by Gauss panels over the graded mesh cells.
ConditionReport verify_conditions(const CounterexampleSpec& spec, const std::vector<double>& eps_sequence,
                                  int n_cells = 2048, double gamma = 2.0);

/// int_eps^1 x^-1 cos^2(t x^-b) dx = ln(1/eps)/2 + (Ci(2 t eps^-b) - Ci(2 t)) / (2b).
double log_cos_sq_integral(double eps, double t, double b);

struct HolderPair {
  double s = 0.0;
  double t = 0.0;
};

struct HolderSample {
  double delta = 0.0;
  double form_difference = 0.0;        // ||A(t) - A(s)|| in the V operator norm
  double trajectory_quotient = 0.0;    // ||u(t) - u(s)||_V^2 / |t - s|
};

struct HolderReport {
  std::vector<HolderSample> samples;
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;
  double trajectory_modulus = 0.0;     // sup of trajectory_quotient
};

/// n_delta log-spaced gaps in [1e-5, 1e-1] T, n_base seeded base points each.
std::vector<HolderPair> holder_pairs(double horizon_T, int n_delta, int n_base, std::uint64_t seed);

/// Throws PreconditionError unless >= 20 pairs spanning >= 3 decades.
HolderReport holder_estimate(const CounterexampleFamily& family, const std::vector<HolderPair>& pairs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
/// Ordinary least squares of log y against log x.
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace maxreg
