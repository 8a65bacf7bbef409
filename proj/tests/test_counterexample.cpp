#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "maxreg/counterexample.hpp"
#include "maxreg/error.hpp"
#include "maxreg/quadrature.hpp"

using namespace maxreg;

namespace {

CounterexampleSpec make_spec(Variant v) {
  CounterexampleSpec s;
  s.variant = v;
  return s;
}

CounterexampleFamily family(Variant v, double eps = 1e-2, int n = 256, MassModel model = MassModel::lumped) {
  return CounterexampleFamily(make_spec(v), make_spaces(build_mesh(eps, n, 2.0), 1.5, model));
}

GridFunction random_function(const GelfandTriple& sp, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXcd v(sp.dofs());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(n(rng), n(rng));
  return sp.make(v);
}

// Smallest grid point d (step 1e-3) above the larger root of d^2 - 4d - 1.1 for the default exponents:
// int_0^1 x^2 = 1/3, int_0^1 x^2 x^-3/2 = 2/3.
double default_d_oracle() { return std::ceil((2.0 + std::sqrt(5.1)) * 1000.0) / 1000.0; }

}  // namespace

TEST_CASE("variant names") {
  CHECK(parse_variant("symmetric") == Variant::symmetric);
  CHECK(parse_variant("nonsymmetric") == Variant::nonsymmetric);
  CHECK(to_string(Variant::symmetric) == "symmetric");
  try {
    parse_variant("skew");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "variant");
  }
}

TEST_CASE("spec validation") {
  auto s = make_spec(Variant::symmetric);
  s.shift_d = 0.5;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s = make_spec(Variant::nonsymmetric);
  s.horizon_T = 0.0;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s = make_spec(Variant::nonsymmetric);
  s.alpha = -1.0;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  CHECK_NOTHROW(make_spec(Variant::symmetric).validate());
  // spaces with a different V weight are rejected
  CHECK_THROWS_AS(CounterexampleFamily(make_spec(Variant::nonsymmetric), make_spaces(build_mesh(0.1, 8, 1.0), 1.0)),
                  PreconditionError);
}

TEST_CASE("trajectory at t = 0") {
  const auto fam = family(Variant::nonsymmetric, 0.1, 8);
  const auto& mesh = *fam.spaces()->mesh();
  const GridFunction u = fam.u(0.0);
  const GridFunction ud = fam.u_dot(0.0);
  for (int j = 0; j <= 8; ++j) {
    const double x = mesh.node(j);
    CHECK(std::abs(u.coeffs()[j] - Complex(x)) <= 1e-15);
    CHECK(std::abs(ud.coeffs()[j] - Complex(0.0, std::pow(x, -0.5))) <= 1e-14);
  }
  const auto sym = family(Variant::symmetric, 0.1, 8);
  const double d = sym.shift_d();
  for (int j = 0; j <= 8; ++j) {
    const double x = mesh.node(j);
    CHECK(sym.u(0.0).coeffs()[j].real() == doctest::Approx(d * x).epsilon(1e-15));
    CHECK(sym.u_dot(0.0).coeffs()[j].real() == doctest::Approx(std::pow(x, -0.5)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(fam.u(-0.1), PreconditionError);
  CHECK_THROWS_AS(fam.u(1.5), PreconditionError);
}

TEST_CASE("nonsymmetric trajectory has time-independent modulus") {
  const auto fam = family(Variant::nonsymmetric);
  const auto& sp = *fam.spaces();
  const double h0 = sp.norm_H(fam.u(0.0));
  const double v0 = sp.norm_V(fam.u(0.0));
  for (double t : {0.1, 0.37, 0.5, 0.99, 1.0}) {
    CHECK(sp.norm_H(fam.u(t)) == doctest::Approx(h0).epsilon(1e-12));
    CHECK(sp.norm_V(fam.u(t)) == doctest::Approx(v0).epsilon(1e-12));
  }
}

TEST_CASE("exact derivative agrees with a difference quotient") {
  for (auto v : {Variant::nonsymmetric, Variant::symmetric}) {
    const auto fam = family(v);
    for (double x : {0.01, 0.1, 0.5, 1.0}) {
      const double t = 0.4, h = 1e-6;
      const Complex fd = (fam.u_exact(t + h, x) - fam.u_exact(t - h, x)) / (2 * h);
      CHECK(std::abs(fd - fam.udot_exact(t, x)) <= 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("choose_d matches the quadratic root oracle") {
  CHECK(choose_d(make_spec(Variant::symmetric)) == doctest::Approx(default_d_oracle()).epsilon(1e-12));
  CHECK(choose_d(make_spec(Variant::symmetric)) == doctest::Approx(4.259).epsilon(1e-12));
  auto scaled = make_spec(Variant::symmetric);
  scaled.profile_scale = 7.0;
  CHECK(choose_d(scaled) == doctest::Approx(4.259).epsilon(1e-12));
  auto flat = make_spec(Variant::symmetric);
  flat.phase_scale = 0.0;
  // (d-1)^2 >= 0.1
  CHECK(choose_d(flat) == doctest::Approx(std::ceil((1.0 + std::sqrt(0.1)) * 1000.0) / 1000.0).epsilon(1e-12));
  auto divergent = make_spec(Variant::symmetric);
  divergent.profile_exp = 0.2;  // |c|^2 |phi| ~ x^-1.1
  CHECK_THROWS_AS(choose_d(divergent), PreconditionError);
}

TEST_CASE("coercivity constants against continuum oracles") {
  // nonsymmetric: Re b(u,u) = |u|_H^2 for the lumped pairing, ratio -> (1/3)/(2/3)
  const auto ns = family(Variant::nonsymmetric, 1e-4, 1024);
  CHECK(ns.alpha() == doctest::Approx(0.5).epsilon(2e-2));
  const auto sy = family(Variant::symmetric, 1e-4, 1024);
  const double d = sy.shift_d();
  const double oracle = ((d - 1) * (d - 1) / 3.0 - (d + 1) * 2.0 / 3.0) / ((d + 1) * (d + 1) * 2.0 / 3.0);
  CHECK(sy.alpha() == doctest::Approx(oracle).epsilon(5e-2));
  CHECK(sy.k_term() == doctest::Approx(2.0 / sy.alpha() * std::pow(sy.M() + sy.alpha() / 2, 2)));
}

TEST_CASE("z is V-orthogonal to u and equals the Gram-Schmidt remainder of T u") {
  for (auto v : {Variant::nonsymmetric, Variant::symmetric}) {
    for (auto model : {MassModel::lumped, MassModel::consistent}) {
      const auto fam = family(v, 1e-2, 128, model);
      const auto& sp = *fam.spaces();
      for (double t : fam.time_sample()) {
        const TrajectoryPoint p = fam.trajectory(t);
        CHECK(std::abs(sp.inner_V(p.z, p.u)) <= 1e-10 * p.n1 * std::max(p.n2, 1e-300) + 1e-14 * p.n1 * p.n1);
        const GridFunction Tu = fam.partial_form_at(t).riesz();
        const GridFunction gs = Tu - (sp.inner_V(Tu, p.u) / (p.n1 * p.n1)) * p.u;
        CHECK(sp.norm_V(gs - p.z) <= 1e-10 * sp.norm_V(Tu));
      }
    }
  }
}

TEST_CASE("assembled forms satisfy the defining identity, coercivity and symmetry") {
  std::mt19937_64 rng(17);
  for (auto v : {Variant::nonsymmetric, Variant::symmetric}) {
    const auto fam = family(v, 1e-2, 128);
    const auto& sp = *fam.spaces();
    for (double t : {0.0, 0.25, 0.8, 1.0}) {
      const FormOperator A = fam.assemble_form(t);
      const GridFunction U = fam.u(t);
      const GridFunction Ud = fam.u_dot(t);
      for (int i = 0; i < 10; ++i) {
        const GridFunction w = random_function(sp, rng);
        const Complex rhs = sp.inner_H(U - Ud, w);
        CHECK(std::abs(A(U, w) - rhs) <= 1e-9 * (std::abs(rhs) + sp.norm_V(U) * sp.norm_V(w)));
      }
      for (const Complex p : numerical_range_sample(A, 200, 3).points) CHECK(p.real() >= fam.alpha() / 2 * (1 - 1e-10));
      CHECK(operator_norm(A) <= composite_bound(fam.alpha(), fam.M()) * (1 + 1e-12));
      if (v == Variant::symmetric) {
        CHECK(weak_asymmetry(A) <= 1e-12);
      } else {
        CHECK(weak_asymmetry(A) >= 1e-3);
      }
    }
  }
}

TEST_CASE("condition integrals against closed forms") {
  const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  const auto ns = verify_conditions(make_spec(Variant::nonsymmetric), eps, 512, 2.0);
  REQUIRE(ns.rows.size() == 3);
  for (const auto& r : ns.rows) {
    const double v_exact = 2.0 / 3.0 * (1.0 - std::pow(r.epsilon, 1.5));
    CHECK(r.v_integral == doctest::Approx(v_exact).epsilon(1e-10));
    CHECK(r.vdual_integral == doctest::Approx(v_exact).epsilon(1e-10));
    CHECK(r.h_truncated == doctest::Approx(std::log(1.0 / r.epsilon)).epsilon(1e-10));
  }
  CHECK(ns.h_strictly_increasing);
  for (double inc : ns.h_increments) CHECK(inc == doctest::Approx(std::log(10.0)).epsilon(1e-10));

  const auto sy = verify_conditions(make_spec(Variant::symmetric), eps, 512, 2.0);
  CHECK(sy.h_closed_form);
  for (const auto& r : sy.rows) CHECK(r.h_truncated == doctest::Approx(log_cos_sq_integral(r.epsilon, 1.0, 1.5)));
  CHECK_THROWS_AS(verify_conditions(make_spec(Variant::symmetric), {1e-3, 1e-2}), PreconditionError);
}

TEST_CASE("log_cos_sq_integral against quadrature in the substituted variable") {
  // int_eps^1 x^-1 cos^2(t x^-b) dx = (1/b) int_1^Y y^-1 cos^2(t y) dy, Y = eps^-b
  for (double eps : {0.5, 1e-1, 1e-2}) {
    for (double t : {0.3, 1.0}) {
      const double b = 1.5;
      const double Y = std::pow(eps, -b);
      const int panels = static_cast<int>(std::ceil((Y - 1.0) / 0.05));
      double sum = 0.0;
      for (int k = 0; k < panels; ++k) {
        const double lo = 1.0 + (Y - 1.0) * k / panels;
        const double hi = 1.0 + (Y - 1.0) * (k + 1) / panels;
        sum += quadrature::integrate([&](double y) { return std::pow(std::cos(t * y), 2) / y; }, lo, hi);
      }
      CHECK(log_cos_sq_integral(eps, t, b) == doctest::Approx(sum / b).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(log_cos_sq_integral(1.5, 1.0, 1.5), PreconditionError);
}

TEST_CASE("cutoff function") {
  const double T = 2.0;
  CHECK(cutoff(0.0, T) == 0.0);
  CHECK(cutoff(T / 4, T) == doctest::Approx(0.5));
  CHECK(cutoff(T / 2, T) == 1.0);
  CHECK(cutoff(0.7 * T, T) == 1.0);
  CHECK(cutoff_derivative(T / 4, T) == doctest::Approx(std::numbers::pi / T));
  CHECK(cutoff_derivative(0.0, T) == 0.0);
  CHECK(std::abs(cutoff_derivative(T / 2 - 1e-9, T)) < 1e-8);
  const double h = 1e-6;
  for (double t : {0.1, 0.3, 0.9}) {
    CHECK(cutoff_derivative(t, T) == doctest::Approx((cutoff(t + h, T) - cutoff(t - h, T)) / (2 * h)).epsilon(1e-8));
  }
  const auto fam = family(Variant::nonsymmetric, 0.1, 16);
  const CutoffSolution cs = fam.cutoff_solution(0.25);
  const double c = cutoff(0.25, 1.0), dc = cutoff_derivative(0.25, 1.0);
  CHECK((cs.w.coeffs() - c * fam.u(0.25).coeffs()).norm() <= 1e-14);
  CHECK((cs.rhs.coeffs() - (c + dc) * fam.u(0.25).coeffs()).norm() <= 1e-13);
}

TEST_CASE("time sample") {
  const auto fam = family(Variant::nonsymmetric, 0.1, 16);
  const auto ts = fam.time_sample();
  REQUIRE(ts.size() == 22);
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == 1.0);
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(ts[k] > ts[k - 1]);
}

TEST_CASE("oscillation indicator flags coarse meshes") {
  CHECK_FALSE(family(Variant::nonsymmetric, 1e-4, 64).oscillation_resolved());
  CHECK(family(Variant::nonsymmetric, 0.5, 64).oscillation_resolved());
}

TEST_CASE("Hoelder sampling") {
  const auto pairs = holder_pairs(2.0, 25, 8, 5);
  REQUIRE(pairs.size() == 200);
  double dmin = 1e9, dmax = 0.0;
  for (const auto& p : pairs) {
    CHECK(p.s >= 0.0);
    CHECK(p.t <= 2.0);
    dmin = std::min(dmin, p.t - p.s);
    dmax = std::max(dmax, p.t - p.s);
  }
  CHECK(dmin == doctest::Approx(2e-5));
  CHECK(dmax == doctest::Approx(0.2));
  CHECK(holder_pairs(2.0, 25, 8, 5).front().s == pairs.front().s);

  const auto fam = family(Variant::nonsymmetric, 0.1, 32);
  CHECK(operator_difference_norm(fam.assemble_form(0.3), fam.assemble_form(0.3)) <= 1e-12);
  CHECK_THROWS_AS(holder_estimate(fam, holder_pairs(1.0, 2, 5, 1)), PreconditionError);
  std::vector<HolderPair> narrow;
  for (int k = 0; k < 30; ++k) narrow.push_back({0.1, 0.1 + 0.01 * (1 + k % 3)});
  CHECK_THROWS_AS(holder_estimate(fam, narrow), PreconditionError);
}

TEST_CASE("loglog_fit recovers a power law") {
  std::vector<double> x, y;
  for (int k = 0; k < 10; ++k) {
    x.push_back(std::pow(10.0, -k * 0.5));
    y.push_back(3.0 * std::pow(x.back(), 0.5));
  }
  const LineFit fit = loglog_fit(x, y);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_fit({1.0, 1.0}, {2.0, 3.0}), PreconditionError);
}
