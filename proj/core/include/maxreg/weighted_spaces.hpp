#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "maxreg/mesh.hpp"
#include "maxreg/tridiagonal.hpp"

namespace maxreg {

using Complex = std::complex<double>;

/// Power weight x -> x^(-exponent). H uses 0, V uses a, V' uses -a.
struct WeightSpec {
  double exponent = 0.0;

  double operator()(double x) const { return exponent == 0.0 ? 1.0 : std::pow(x, -exponent); }
};

/// Coefficient vector over the nodal basis of a mesh.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(MeshPtr mesh, Eigen::VectorXcd coeffs);
  static GridFunction zeros(MeshPtr mesh);

  const MeshPtr& mesh() const noexcept { return mesh_; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXcd& coeffs() noexcept { return coeffs_; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }

  /// Evaluates the piecewise-linear function at x in [epsilon, 1].
  Complex operator()(double x) const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(Complex s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Complex s, GridFunction a) { return a *= s; }

 private:
  MeshPtr mesh_;
  Eigen::VectorXcd coeffs_;
};

void require_same_mesh(const MeshPtr& a, const MeshPtr& b);

/// Exact Gram matrix of the nodal basis: entries int x^(-exponent) phi_i phi_j over [epsilon, 1].
SymTridiagonal assemble_gram(const Mesh& mesh, WeightSpec weight);

enum class MassModel { consistent, lumped };

struct GramSet {
  SymTridiagonal gram_H;
  SymTridiagonal gram_V;
  SymTridiagonal gram_Vdual;
};

GramSet assemble_grams(const Mesh& mesh, double v_exponent, MassModel model);

/// (f|g) = g^H Gram f: linear in f, conjugate-linear in g.
Complex inner(const SymTridiagonal& gram, const GridFunction& f, const GridFunction& g);
double norm(const SymTridiagonal& gram, const GridFunction& f);

using PointFunction = std::function<Complex(double)>;

/// Nodal interpolant. Throws PreconditionError on a non-finite sample.
GridFunction interpolate(const PointFunction& fn, const MeshPtr& mesh);

/// int_{epsilon}^{1} fn(x) dx with 20-point Gauss panels per cell.
Complex integrate(const Mesh& mesh, const PointFunction& fn);
double integrate_real(const Mesh& mesh, const std::function<double(double)>& fn);

/// ( int w |f - fn|^2 )^(1/2) for the piecewise-linear f.
double weighted_l2_error(const GridFunction& f, const PointFunction& fn, WeightSpec weight);

/// The discrete Gelfand triple V -> H -> V' with H = L^2, V = L^2(x^(-a)), V' = L^2(x^a).
class GelfandTriple {
 public:
  GelfandTriple(MeshPtr mesh, double v_exponent, MassModel model = MassModel::lumped);

  const MeshPtr& mesh() const noexcept { return mesh_; }
  double v_exponent() const noexcept { return v_exponent_; }
  MassModel mass_model() const noexcept { return model_; }
  const GramSet& grams() const noexcept { return grams_; }
  Eigen::Index dofs() const noexcept { return mesh_->dofs(); }

  Complex inner_H(const GridFunction& f, const GridFunction& g) const { return inner(grams_.gram_H, f, g); }
  Complex inner_V(const GridFunction& f, const GridFunction& g) const { return inner(grams_.gram_V, f, g); }
  Complex inner_Vdual(const GridFunction& f, const GridFunction& g) const { return inner(grams_.gram_Vdual, f, g); }
  double norm_H(const GridFunction& f) const { return norm(grams_.gram_H, f); }
  double norm_V(const GridFunction& f) const { return norm(grams_.gram_V, f); }
  double norm_Vdual(const GridFunction& f) const { return norm(grams_.gram_Vdual, f); }

  /// <f, v>_{V',V} through the embedding H -> V'.
  Complex dual_pairing(const GridFunction& f, const GridFunction& v) const { return inner_H(f, v); }

  /// Solves Gram_V g = rhs.
  Eigen::VectorXcd solve_V(const Eigen::VectorXcd& rhs) const { return factor_V_.solve(rhs); }

  GridFunction make(Eigen::VectorXcd coeffs) const { return GridFunction(mesh_, std::move(coeffs)); }
  GridFunction zeros() const { return GridFunction::zeros(mesh_); }

 private:
  MeshPtr mesh_;
  double v_exponent_;
  MassModel model_;
  GramSet grams_;
  TridiagonalLDLT factor_V_;
};

using SpacesPtr = std::shared_ptr<const GelfandTriple>;

SpacesPtr make_spaces(MeshPtr mesh, double v_exponent, MassModel model = MassModel::lumped);

}  // namespace maxreg
