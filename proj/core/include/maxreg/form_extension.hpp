#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/weighted_spaces.hpp"

namespace maxreg {

enum class ExtensionMode { accretive, selfadjoint };

/// Bounded sesquilinear form b on span{u0} x V, stored through the Riesz
/// representative T u0 of b(u0, .) in V.
class PartialForm {
 public:
  PartialForm(SpacesPtr spaces, GridFunction u0, GridFunction riesz_T_u0);

  const SpacesPtr& spaces() const noexcept { return spaces_; }
  const GridFunction& u0() const noexcept { return u0_; }
  const GridFunction& riesz() const noexcept { return riesz_; }

  /// b(scale * u0, v) = scale * (T u0 | v)_V
  Complex operator()(Complex scale, const GridFunction& v) const;
  Complex operator()(const GridFunction& v) const { return (*this)(1.0, v); }

  /// ||T|| on the one-dimensional domain: ||T u0||_V / ||u0||_V.
  double operator_norm() const;

 private:
  SpacesPtr spaces_;
  GridFunction u0_;
  GridFunction riesz_;
};

struct ExtensionConfig {
  ExtensionMode mode = ExtensionMode::accretive;
  double eps_lower = 0.0;          // W(T) in {Re z >= eps_lower}; selfadjoint mode
  std::optional<double> k_term;    // (S e2|e2); defaults to eps_lower^-1 ||T||^2
};

struct BoundCertificate {
  double norm_bound = 0.0;
  double coercivity_bound = 0.0;
};

struct ExtensionDiagnostics {
  double t_norm = 0.0;           // ||T|| of the (possibly shifted) partial operator
  double b_norm = 0.0;           // ||b|| of the unshifted partial form
  double coercivity_on_u = 0.0;  // Re b(u0,u0) / ||u0||_V^2
  double k_term = 0.0;
  bool degenerate = false;       // T U inside U, trivial extension used
  bool bound_within_target = true;
};

/// a(v1, v2) = sum_ij S_ij (v1|e_j)_V (e_i|v2)_V + alpha_shift (v1|v2)_V
/// with a V-orthonormal basis (e_1, ..., e_k), k <= 2 for the constructions here.
/// S_ij = (S e_j | e_i)_V.
class FormOperator {
 public:
  FormOperator(SpacesPtr spaces, double alpha_shift, std::vector<GridFunction> basis, Eigen::MatrixXcd s_matrix,
               BoundCertificate cert, ExtensionMode mode, ExtensionDiagnostics diagnostics = {});

  /// alpha * (. | .)_V
  static FormOperator scaled_identity(SpacesPtr spaces, double alpha);

  const SpacesPtr& spaces() const noexcept { return spaces_; }
  double alpha_shift() const noexcept { return alpha_shift_; }
  const std::vector<GridFunction>& basis() const noexcept { return basis_; }
  const GridFunction& basis_u() const { return basis_.at(0); }
  const GridFunction* basis_z() const { return basis_.size() > 1 ? &basis_[1] : nullptr; }
  const Eigen::MatrixXcd& s_matrix() const noexcept { return s_; }
  const BoundCertificate& certificate() const noexcept { return cert_; }
  ExtensionMode mode() const noexcept { return mode_; }
  const ExtensionDiagnostics& diagnostics() const noexcept { return diag_; }
  Eigen::Index rank() const noexcept { return s_.rows(); }

  Complex operator()(const GridFunction& v1, const GridFunction& v2) const;

  /// The extended operator in V: v -> sum_ij S_ij (v|e_j) e_i + alpha_shift v.
  GridFunction apply(const GridFunction& v) const;

  /// Coefficients y with a(v, phi) = phi^H y for all basis vectors phi.
  Eigen::VectorXcd weak_apply(const Eigen::VectorXcd& v) const;

  /// Columns Gram_V e_j; the weak matrix is alpha_shift Gram_V + E S E^H.
  const Eigen::MatrixXcd& weak_factor() const noexcept { return E_; }

  /// Dense weak matrix A_ij = a(phi_j, phi_i); small meshes only.
  Eigen::MatrixXcd dense_weak_matrix() const;

  /// Block diag(S + alpha_shift I_k, alpha_shift): the operator restricted to
  /// span{e_j} and its orthogonal complement.
  Eigen::MatrixXcd reduced_block() const;

 private:
  SpacesPtr spaces_;
  double alpha_shift_;
  std::vector<GridFunction> basis_;
  Eigen::MatrixXcd s_;
  BoundCertificate cert_;
  ExtensionMode mode_;
  ExtensionDiagnostics diag_;
  Eigen::MatrixXcd E_;
};

/// Solves Gram_V g = functional, so that (g|v)_V = v^H functional.
GridFunction riesz_map(const GelfandTriple& spaces, const Eigen::VectorXcd& functional);

/// Two-pass Gram-Schmidt in V; vectors whose remainder has V-norm below
/// drop_tol times their original norm are dropped.
std::vector<GridFunction> orthonormalize(const GelfandTriple& spaces, std::span<const GridFunction> vectors,
                                         double drop_tol = 1e-12);

/// Extension by zero on the orthogonal complement of U = span(span_vectors),
/// where images[j] = T span_vectors[j] must lie in U.
FormOperator trivial_extension(const SpacesPtr& spaces, std::span<const GridFunction> span_vectors,
                               std::span<const GridFunction> images,
                               ExtensionMode mode = ExtensionMode::accretive);
FormOperator trivial_extension(const PartialForm& pf, ExtensionMode mode = ExtensionMode::accretive);

/// Accretive extension with ||T^|| <= sqrt(2) ||T||.
FormOperator extend_accretive(const PartialForm& pf);

/// Self-adjoint non-negative extension with ||T^|| <= sqrt(2)(||T|| + k_term).
FormOperator extend_selfadjoint(const PartialForm& pf, const ExtensionConfig& cfg);

/// sqrt(2)(M + alpha/2 + 2/alpha (M + alpha/2)^2) + alpha/2
double composite_bound(double alpha, double M);

/// Extends b with |b(u,v)| <= M|u||v| and Re b(u,u) >= alpha |u|^2 on U to a
/// form on V x V with coercivity alpha/2 and norm <= composite_bound(alpha, M).
FormOperator extend_form(const PartialForm& pf, double alpha, double M, ExtensionMode mode,
                         std::optional<double> k_term = std::nullopt);

double operator_norm(const FormOperator& op);

/// ||A - A^H||_F / ||A||_F for the weak matrix A, evaluated through the rank structure.
double weak_asymmetry(const FormOperator& op);

struct RangeSample {
  std::vector<Complex> points;
};

/// Rayleigh quotients a(w,w)/(w|w)_V for k seeded random vectors
/// w = sum_j lambda_j e_j + mu r, r a random unit vector of the mesh space.
RangeSample numerical_range_sample(const FormOperator& op, int k, std::uint64_t seed);

/// ||A - B|| in the V-operator norm, computed exactly on the joint span of both bases.
double operator_difference_norm(const FormOperator& A, const FormOperator& B);

}  // namespace maxreg
