#include "maxreg/tridiagonal.hpp"

#include "maxreg/error.hpp"

namespace maxreg {

SymTridiagonal::SymTridiagonal(Eigen::VectorXd diag, Eigen::VectorXd off)
    : diag_(std::move(diag)), off_(std::move(off)) {
  if (diag_.size() > 0 && off_.size() != diag_.size() - 1) {
    throw PreconditionError("tridiagonal: off-diagonal length must be size-1");
  }
}

Eigen::VectorXcd SymTridiagonal::apply(const Eigen::VectorXcd& x) const {
  const Eigen::Index n = size();
  Eigen::VectorXcd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::complex<double> s = diag_[i] * x[i];
    if (i > 0) s += off_[i - 1] * x[i - 1];
    if (i + 1 < n) s += off_[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::complex<double> SymTridiagonal::form(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) const {
  const Eigen::Index n = size();
  std::complex<double> s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s += diag_[i] * std::conj(g[i]) * f[i];
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    s += off_[i] * (std::conj(g[i]) * f[i + 1] + std::conj(g[i + 1]) * f[i]);
  }
  return s;
}

SymTridiagonal SymTridiagonal::lumped() const {
  Eigen::VectorXd d = diag_;
  for (Eigen::Index i = 0; i < off_.size(); ++i) {
    d[i] += off_[i];
    d[i + 1] += off_[i];
  }
  return SymTridiagonal(std::move(d), Eigen::VectorXd::Zero(off_.size()));
}

Eigen::MatrixXd SymTridiagonal::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag_[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = off_[i];
    m(i + 1, i) = off_[i];
  }
  return m;
}

SymTridiagonal combine(double a, const SymTridiagonal& A, double b, const SymTridiagonal& B) {
  if (A.size() != B.size()) throw PreconditionError("tridiagonal combine: size mismatch");
  return SymTridiagonal(a * A.diag_ + b * B.diag_, a * A.off_ + b * B.off_);
}

TridiagonalLDLT::TridiagonalLDLT(const SymTridiagonal& A) {
  const Eigen::Index n = A.size();
  d_.resize(n);
  l_.resize(n > 0 ? n - 1 : 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double di = A.diag()[i];
    if (i > 0) di -= l_[i - 1] * l_[i - 1] * d_[i - 1];
    if (!(di > 0.0)) throw Error("tridiagonal LDL^T: matrix is not positive definite");
    d_[i] = di;
    if (i + 1 < n) l_[i] = A.off()[i] / di;
  }
}

Eigen::VectorXcd TridiagonalLDLT::solve(const Eigen::VectorXcd& b) const {
  const Eigen::Index n = size();
  if (b.size() != n) throw PreconditionError("tridiagonal solve: size mismatch");
  Eigen::VectorXcd x = b;
  for (Eigen::Index i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
  for (Eigen::Index i = 0; i < n; ++i) x[i] /= d_[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= l_[i] * x[i + 1];
  return x;
}

Eigen::MatrixXcd TridiagonalLDLT::solve(const Eigen::MatrixXcd& B) const {
  Eigen::MatrixXcd X(B.rows(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) X.col(j) = solve(Eigen::VectorXcd(B.col(j)));
  return X;
}

}  // namespace maxreg
