#pragma once

#include <complex>

#include <Eigen/Dense>

namespace maxreg {

/// Real symmetric tridiagonal matrix. All Gram matrices of the piecewise-linear
/// nodal basis have this structure.
class SymTridiagonal {
 public:
  SymTridiagonal() = default;
  SymTridiagonal(Eigen::VectorXd diag, Eigen::VectorXd off);

  Eigen::Index size() const noexcept { return diag_.size(); }
  const Eigen::VectorXd& diag() const noexcept { return diag_; }
  const Eigen::VectorXd& off() const noexcept { return off_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  /// g^H * A * f, evaluated without temporaries.
  std::complex<double> form(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const;

  /// Row-sum lumped (diagonal) version.
  SymTridiagonal lumped() const;

  bool is_diagonal() const noexcept { return off_.size() == 0 || off_.cwiseAbs().maxCoeff() == 0.0; }

  Eigen::MatrixXd dense() const;

  /// a*A + b*B
  friend SymTridiagonal combine(double a, const SymTridiagonal& A, double b, const SymTridiagonal& B);

 private:
  Eigen::VectorXd diag_;
  Eigen::VectorXd off_;
};

/// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
class TridiagonalLDLT {
 public:
  TridiagonalLDLT() = default;
  explicit TridiagonalLDLT(const SymTridiagonal& A);

  Eigen::Index size() const noexcept { return d_.size(); }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& B) const;

 private:
  Eigen::VectorXd d_;  // pivots
  Eigen::VectorXd l_;  // subdiagonal of the unit lower factor
};

}  // namespace maxreg
