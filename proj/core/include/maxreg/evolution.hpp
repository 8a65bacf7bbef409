#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "maxreg/counterexample.hpp"
#include "maxreg/form_extension.hpp"
#include "maxreg/weighted_spaces.hpp"

namespace maxreg {

/// Uniform partition of [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon_T, int n_steps);

  double horizon_T() const noexcept { return T_; }
  int n_steps() const noexcept { return n_; }
  double dt() const noexcept { return T_ / n_; }
  double node(int k) const noexcept { return k == n_ ? T_ : T_ * k / n_; }

 private:
  double T_;
  int n_;
};

struct SolverConfig {
  double theta = 1.0;       // 1 implicit Euler, 1/2 midpoint
  double tolerance = 1e-8;  // relative residual allowed for each linear solve

  /// Throws ConfigError("theta", ...) outside [1/2, 1].
  void validate() const;
};

struct SolveNorms {
  double u_L2V = 0.0;
  double udot_L2Vdual = 0.0;
  double udot_L2H = 0.0;
  double u_LinfH = 0.0;
};

struct SolveResult {
  SpacesPtr spaces;
  std::vector<double> times;                     // n_steps + 1 nodes
  std::vector<GridFunction> trajectory;          // u_k at the nodes
  std::vector<GridFunction> discrete_derivative; // (u_{k+1} - u_k) / dt, n_steps entries
  std::vector<double> theta_times;               // t_k + theta dt
  double theta = 1.0;
  SolveNorms norms;
  double residual = 0.0;                         // max relative residual of the step solves
};

using FormProvider = std::function<FormOperator(double)>;
using SourceProvider = std::function<GridFunction(double)>;

/// theta-scheme in the H pairing:
///   (M_H + theta dt A) u_{k+1} = (M_H - (1-theta) dt A) u_k + dt M_H f,  A and f at t_k + theta dt,
/// where A = shift Gram_V + E S E^H is inverted through its rank structure.
SolveResult solve_wacp(const FormProvider& form, const SourceProvider& f, const GridFunction& u0, const TimeGrid& grid,
                       const SolverConfig& cfg);

struct EnergyCheck {
  double lhs = 0.0;     // |u_N|_H^2 + alpha sum dt |u_{k+theta}|_V^2
  double rhs = 0.0;     // |u_0|_H^2 + sum dt |f(t_{k+theta})|_V'^2 / alpha
  double margin = 0.0;  // rhs - lhs
  bool holds = false;
};

/// Discrete energy estimate of the theta-scheme, valid for theta >= 1/2 and
/// Re a(v,v) >= alpha |v|_V^2; alpha is the coercivity constant of the provider.
EnergyCheck energy_inequality_check(const SolveResult& result, const SourceProvider& f, const GridFunction& u0,
                                    double alpha);

/// ( sum dt |u_k - ref(t_k)|_V^2 ) with trapezoid weights, square-rooted.
double l2v_error(const SolveResult& result, const std::function<GridFunction(double)>& reference);

/// Solves the counterexample with the cutoff right-hand side and u0 = 0.
SolveResult solve_cutoff_problem(const CounterexampleFamily& family, int n_steps, const SolverConfig& cfg);

/// Number of uniform steps with dt <= pi / (4 T phi(eps)), at least min_steps.
int steps_for_epsilon(const CounterexampleSpec& spec, double eps, int min_steps = 2);

/// Mesh and step rule for each epsilon of a sweep.
struct RefinementRule {
  int n_cells = 2048;
  double gamma = 2.0;
  double solver_min_eps = 1e-2;  // solver cross-check only for eps >= this
  int solver_cells = 256;
};

struct DivergenceRow {
  double epsilon = 0.0;
  int n_cells = 0;
  double udot_l2h_sq = 0.0;                // closed form, int_{T/2}^T int_eps^1 |udot|^2
  double udot_l2h_sq_quadrature = 0.0;     // same integral by Gauss panels on the mesh cells
  std::optional<double> increment;         // per decade of epsilon, vs previous row
  std::optional<double> solver_udot_l2h_sq;
  double rhs_l2v = 0.0;                    // |(cut + cut') u|_{L^2(0,T;V)} on the mesh
};

struct DivergenceTable {
  std::vector<DivergenceRow> rows;
  bool strictly_increasing = false;
};

/// Closed-form |udot|^2 integrated over [T/2, T] x [eps, 1].
double udot_l2h_sq_closed_form(const CounterexampleSpec& spec, double eps);

/// int_1^Y y^-q sin(lambda y) dy for q > 0, lambda > 0.
double oscillatory_power_integral(double q, double lambda, double Y);

/// Throws Error if the closed-form column is not strictly increasing.
DivergenceTable mr_divergence(const CounterexampleSpec& spec, const std::vector<double>& eps_sequence,
                              const RefinementRule& rule, const SolverConfig& solver = {});

struct ResidualReport {
  int n_cells = 0;
  double max_residual = 0.0;
  double oscillation_indicator = 0.0;
  bool oscillation_flag = false;
};

/// max over grid nodes and n_test seeded test vectors of
///   |<udot, v> + a(t, u, v) - (u|v)_H| / (|v|_V (|u|_H + |udot|_V'))
/// with the pairings of the exact u, udot computed by quadrature.
ResidualReport residual_check(const CounterexampleFamily& family, const TimeGrid& grid, int n_test = 100,
                              std::uint64_t seed = 0);

}  // namespace maxreg
