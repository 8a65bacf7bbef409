#include "maxreg/form_extension.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "maxreg/error.hpp"

namespace maxreg {

namespace {

constexpr double kInvarianceTol = 1e-10;
constexpr double kDegenerateTol = 1e-12;
constexpr double kRealTol = 1e-10;

double max_abs_imag(const Eigen::VectorXcd& v) {
  return v.size() == 0 ? 0.0 : v.imag().cwiseAbs().maxCoeff();
}

double max_abs(const Eigen::VectorXcd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

PartialForm::PartialForm(SpacesPtr spaces, GridFunction u0, GridFunction riesz_T_u0)
    : spaces_(std::move(spaces)), u0_(std::move(u0)), riesz_(std::move(riesz_T_u0)) {
  if (!spaces_) throw PreconditionError("partial form: null spaces");
  require_same_mesh(spaces_->mesh(), u0_.mesh());
  require_same_mesh(spaces_->mesh(), riesz_.mesh());
  if (!(spaces_->norm_V(u0_) > 0.0)) throw PreconditionError("partial form: u0 must be nonzero");
}

Complex PartialForm::operator()(Complex scale, const GridFunction& v) const {
  return scale * spaces_->inner_V(riesz_, v);
}

double PartialForm::operator_norm() const { return spaces_->norm_V(riesz_) / spaces_->norm_V(u0_); }

FormOperator::FormOperator(SpacesPtr spaces, double alpha_shift, std::vector<GridFunction> basis,
                           Eigen::MatrixXcd s_matrix, BoundCertificate cert, ExtensionMode mode,
                           ExtensionDiagnostics diagnostics)
    : spaces_(std::move(spaces)),
      alpha_shift_(alpha_shift),
      basis_(std::move(basis)),
      s_(std::move(s_matrix)),
      cert_(cert),
      mode_(mode),
      diag_(diagnostics) {
  const auto k = static_cast<Eigen::Index>(basis_.size());
  if (s_.rows() != k || s_.cols() != k) throw PreconditionError("form operator: S must be k x k for k basis vectors");
  E_.resize(spaces_->dofs(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    require_same_mesh(spaces_->mesh(), basis_[static_cast<std::size_t>(j)].mesh());
    E_.col(j) = spaces_->grams().gram_V.apply(basis_[static_cast<std::size_t>(j)].coeffs());
  }
}

FormOperator FormOperator::scaled_identity(SpacesPtr spaces, double alpha) {
  return FormOperator(std::move(spaces), alpha, {}, Eigen::MatrixXcd(0, 0), {std::abs(alpha), alpha},
                      ExtensionMode::selfadjoint);
}

Complex FormOperator::operator()(const GridFunction& v1, const GridFunction& v2) const {
  Complex value = alpha_shift_ == 0.0 ? Complex(0.0) : alpha_shift_ * spaces_->inner_V(v1, v2);
  if (rank() > 0) {
    const Eigen::VectorXcd p = E_.adjoint() * v1.coeffs();  // (v1|e_j)
    const Eigen::VectorXcd q = E_.adjoint() * v2.coeffs();  // (v2|e_i)
    value += q.dot(s_ * p);
  }
  return value;
}

GridFunction FormOperator::apply(const GridFunction& v) const {
  Eigen::VectorXcd out = alpha_shift_ * v.coeffs();
  if (rank() > 0) {
    const Eigen::VectorXcd coeff = s_ * (E_.adjoint() * v.coeffs());
    for (Eigen::Index i = 0; i < rank(); ++i) out += coeff[i] * basis_[static_cast<std::size_t>(i)].coeffs();
  }
  return GridFunction(spaces_->mesh(), std::move(out));
}

Eigen::VectorXcd FormOperator::weak_apply(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd y = alpha_shift_ * spaces_->grams().gram_V.apply(v);
  if (rank() > 0) y += E_ * (s_ * (E_.adjoint() * v));
  return y;
}

Eigen::MatrixXcd FormOperator::dense_weak_matrix() const {
  Eigen::MatrixXcd A = alpha_shift_ * spaces_->grams().gram_V.dense().cast<Complex>();
  if (rank() > 0) A += E_ * s_ * E_.adjoint();
  return A;
}

Eigen::MatrixXcd FormOperator::reduced_block() const {
  const Eigen::Index k = rank();
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  block.topLeftCorner(k, k) = s_ + alpha_shift_ * Eigen::MatrixXcd::Identity(k, k);
  block(k, k) = alpha_shift_;
  return block;
}

GridFunction riesz_map(const GelfandTriple& spaces, const Eigen::VectorXcd& functional) {
  if (functional.size() != spaces.dofs()) throw MeshMismatchError("riesz map: functional length mismatch");
  Eigen::VectorXcd g = spaces.solve_V(functional);
  const Eigen::VectorXcd residual = spaces.grams().gram_V.apply(g) - functional;
  const double scale = std::max(functional.norm(), std::numeric_limits<double>::min());
  if (functional.norm() > 0.0 && residual.norm() > 1e-10 * scale) {
    throw Error("riesz map: Gram_V solve residual too large (ill-conditioned Gram matrix)");
  }
  return spaces.make(std::move(g));
}

std::vector<GridFunction> orthonormalize(const GelfandTriple& spaces, std::span<const GridFunction> vectors,
                                         double drop_tol) {
  std::vector<GridFunction> q;
  for (const auto& v : vectors) {
    const double n0 = spaces.norm_V(v);
    if (!(n0 > 0.0)) continue;
    GridFunction r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : q) r -= spaces.inner_V(r, e) * e;
    }
    const double nr = spaces.norm_V(r);
    if (nr <= drop_tol * n0) continue;
    r *= 1.0 / nr;
    q.push_back(std::move(r));
  }
  return q;
}

FormOperator trivial_extension(const SpacesPtr& spaces, std::span<const GridFunction> span_vectors,
                               std::span<const GridFunction> images, ExtensionMode mode) {
  if (span_vectors.size() != images.size() || span_vectors.empty()) {
    throw PreconditionError("trivial extension: need one image per spanning vector");
  }
  const auto m = static_cast<Eigen::Index>(span_vectors.size());
  std::vector<GridFunction> basis = orthonormalize(*spaces, span_vectors);
  if (static_cast<Eigen::Index>(basis.size()) != m) {
    throw PreconditionError("trivial extension: spanning vectors are linearly dependent");
  }
  // R with span_vectors[j] = sum_k R(k,j) e_k; images of e_l via R^{-1}.
  Eigen::MatrixXcd R(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) R(k, j) = spaces->inner_V(span_vectors[j], basis[k]);
  const Eigen::MatrixXcd Rinv = R.inverse();

  Eigen::MatrixXcd S(m, m);
  double t_norm_sq_max = 0.0;
  for (Eigen::Index l = 0; l < m; ++l) {
    GridFunction Te = spaces->zeros();
    for (Eigen::Index j = 0; j < m; ++j) Te += Rinv(j, l) * images[j];
    GridFunction remainder = Te;
    for (Eigen::Index k = 0; k < m; ++k) {
      S(k, l) = spaces->inner_V(Te, basis[k]);
      remainder -= S(k, l) * basis[k];
    }
    const double te = spaces->norm_V(Te);
    t_norm_sq_max = std::max(t_norm_sq_max, te * te);
    if (spaces->norm_V(remainder) > kInvarianceTol * std::max(te, 1.0)) {
      throw PreconditionError("trivial extension: T does not leave U invariant (use the rank-2 extension)");
    }
  }
  if (mode == ExtensionMode::selfadjoint) {
    if ((S - S.adjoint()).cwiseAbs().maxCoeff() > kRealTol * std::max(1.0, S.cwiseAbs().maxCoeff())) {
      throw PreconditionError("trivial extension: W(T) is not real, no self-adjoint trivial extension");
    }
    S = 0.5 * (S + S.adjoint()).eval();
  }
  const Eigen::MatrixXcd herm = 0.5 * (S + S.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  BoundCertificate cert{spectral_norm(S), std::min(0.0, es.eigenvalues().minCoeff())};
  ExtensionDiagnostics diag;
  diag.t_norm = cert.norm_bound;
  diag.degenerate = true;
  return FormOperator(spaces, 0.0, std::move(basis), std::move(S), cert, mode, diag);
}

FormOperator trivial_extension(const PartialForm& pf, ExtensionMode mode) {
  const GridFunction span[] = {pf.u0()};
  const GridFunction images[] = {pf.riesz()};
  return trivial_extension(pf.spaces(), span, images, mode);
}

namespace {

struct OneDimGeometry {
  GridFunction e1;
  double u_norm = 0.0;
  double t_norm = 0.0;
  Complex t11;                     // (T e1|e1)
  std::optional<GridFunction> e2;  // empty when T U inside U
  Complex t21;                     // (T e1|e2)
};

OneDimGeometry one_dim_geometry(const PartialForm& pf) {
  const GelfandTriple& sp = *pf.spaces();
  OneDimGeometry g;
  g.u_norm = sp.norm_V(pf.u0());
  g.e1 = (1.0 / g.u_norm) * pf.u0();
  const GridFunction& Tu = pf.riesz();
  const double tu_norm = sp.norm_V(Tu);
  g.t_norm = tu_norm / g.u_norm;
  g.t11 = sp.inner_V(Tu, g.e1) / g.u_norm;

  GridFunction z = Tu;
  for (int pass = 0; pass < 2; ++pass) z -= sp.inner_V(z, g.e1) * g.e1;
  const double zn = sp.norm_V(z);
  if (zn > kDegenerateTol * tu_norm) {
    z *= 1.0 / zn;
    g.t21 = sp.inner_V(Tu, z) / g.u_norm;
    g.e2 = std::move(z);
  }
  return g;
}

}  // namespace

FormOperator extend_accretive(const PartialForm& pf) {
  const OneDimGeometry g = one_dim_geometry(pf);
  if (g.t11.real() < -1e-12 * std::max(g.t_norm, 1e-300)) {
    throw PreconditionError("extend_accretive: partial form is not accretive, Re (Tu0|u0) < 0");
  }
  if (!g.e2) return trivial_extension(pf, ExtensionMode::accretive);

  Eigen::MatrixXcd S(2, 2);
  S << g.t11, -std::conj(g.t21), g.t21, 0.0;
  ExtensionDiagnostics diag;
  diag.t_norm = g.t_norm;
  return FormOperator(pf.spaces(), 0.0, {g.e1, *g.e2}, std::move(S), {std::sqrt(2.0) * g.t_norm, 0.0},
                      ExtensionMode::accretive, diag);
}

FormOperator extend_selfadjoint(const PartialForm& pf, const ExtensionConfig& cfg) {
  if (!(cfg.eps_lower > 0.0)) throw PreconditionError("extend_selfadjoint: eps_lower must be > 0");
  const auto& u0 = pf.u0().coeffs();
  const auto& Tu = pf.riesz().coeffs();
  if (max_abs_imag(u0) > kRealTol * max_abs(u0) || max_abs_imag(Tu) > kRealTol * std::max(max_abs(Tu), 1e-300)) {
    throw PreconditionError("extend_selfadjoint: u0 and T u0 must be real-valued");
  }
  const OneDimGeometry g = one_dim_geometry(pf);
  const double t11 = g.t11.real();
  if (t11 < cfg.eps_lower * (1.0 - 1e-12)) {
    throw PreconditionError("extend_selfadjoint: (T u0|u0) < eps_lower ||u0||^2");
  }
  if (!g.e2) return trivial_extension(pf, ExtensionMode::selfadjoint);

  const double t21 = g.t21.real();
  const double k_default = g.t_norm * g.t_norm / cfg.eps_lower;
  const double k = cfg.k_term.value_or(k_default);
  if (k < t21 * t21 / t11) {
    throw PreconditionError("extend_selfadjoint: k_term too small for a non-negative extension");
  }
  Eigen::MatrixXcd S(2, 2);
  S << t11, t21, t21, k;
  ExtensionDiagnostics diag;
  diag.t_norm = g.t_norm;
  diag.k_term = k;
  return FormOperator(pf.spaces(), 0.0, {g.e1, *g.e2}, std::move(S), {std::sqrt(2.0) * (g.t_norm + k), 0.0},
                      ExtensionMode::selfadjoint, diag);
}

double composite_bound(double alpha, double M) {
  const double m = M + 0.5 * alpha;
  return std::sqrt(2.0) * (m + 2.0 / alpha * m * m) + 0.5 * alpha;
}

FormOperator extend_form(const PartialForm& pf, double alpha, double M, ExtensionMode mode,
                         std::optional<double> k_term) {
  if (!(alpha > 0.0)) throw PreconditionError("extend_form: alpha must be > 0");
  const GelfandTriple& sp = *pf.spaces();
  const double shift = 0.5 * alpha;
  const double u_norm_sq = std::pow(sp.norm_V(pf.u0()), 2);
  const double b_norm = pf.operator_norm();
  const double coercivity = pf(pf.u0()).real() / u_norm_sq;

  PartialForm shifted(pf.spaces(), pf.u0(), pf.riesz() - Complex(shift) * pf.u0());
  FormOperator inner = mode == ExtensionMode::accretive
                           ? extend_accretive(shifted)
                           : extend_selfadjoint(shifted, ExtensionConfig{mode, shift, k_term});

  ExtensionDiagnostics diag = inner.diagnostics();
  diag.b_norm = b_norm;
  diag.coercivity_on_u = coercivity;
  diag.bound_within_target = b_norm <= M * (1.0 + 1e-12);
  const double M_eff = std::max(M, b_norm);
  double norm_bound = composite_bound(alpha, M_eff);
  if (k_term && mode == ExtensionMode::selfadjoint) {
    norm_bound = std::max(norm_bound, inner.certificate().norm_bound + shift);
  }
  return FormOperator(pf.spaces(), shift, inner.basis(), inner.s_matrix(), {norm_bound, shift}, mode, diag);
}

double operator_norm(const FormOperator& op) {
  const Eigen::MatrixXcd block = op.reduced_block();
  const Eigen::Index k = op.rank();
  const double on_span = spectral_norm(block.topLeftCorner(k, k));
  const double on_complement = k < op.spaces()->dofs() ? std::abs(op.alpha_shift()) : 0.0;
  return std::max(on_span, on_complement);
}

double weak_asymmetry(const FormOperator& op) {
  const double c = op.alpha_shift();
  const SymTridiagonal& GV = op.spaces()->grams().gram_V;
  const double gv_sq = GV.diag().squaredNorm() + 2.0 * GV.off().squaredNorm();
  if (op.rank() == 0) return 0.0;
  const Eigen::MatrixXcd& E = op.weak_factor();
  const Eigen::MatrixXcd G = E.adjoint() * E;
  Eigen::MatrixXcd GVE(E.rows(), E.cols());
  for (Eigen::Index j = 0; j < E.cols(); ++j) GVE.col(j) = GV.apply(E.col(j));
  const Eigen::MatrixXcd H = E.adjoint() * GVE;
  const Eigen::MatrixXcd& S = op.s_matrix();
  // ||E X E^H||_F^2 = tr(X G X^H G)
  auto low_rank_sq = [&](const Eigen::MatrixXcd& X) { return (X * G * X.adjoint() * G).trace().real(); };
  const double a_sq = c * c * gv_sq + 2.0 * c * (H * S).trace().real() + low_rank_sq(S);
  const Eigen::MatrixXcd D = S - S.adjoint();
  return std::sqrt(std::max(low_rank_sq(D), 0.0)) / std::sqrt(a_sq);
}

RangeSample numerical_range_sample(const FormOperator& op, int k, std::uint64_t seed) {
  const GelfandTriple& sp = *op.spaces();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto cnormal = [&] { return Complex(normal(rng), normal(rng)); };

  RangeSample out;
  out.points.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int s = 0; s < k; ++s) {
    Eigen::VectorXcd r(sp.dofs());
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = cnormal();
    GridFunction w = sp.make(std::move(r));
    w *= cnormal() / sp.norm_V(w);
    for (const auto& e : op.basis()) w += cnormal() * e;
    const double nn = std::pow(sp.norm_V(w), 2);
    out.points.push_back(op(w, w) / nn);
  }
  return out;
}

double operator_difference_norm(const FormOperator& A, const FormOperator& B) {
  const GelfandTriple& sp = *A.spaces();
  std::vector<GridFunction> all(A.basis());
  all.insert(all.end(), B.basis().begin(), B.basis().end());
  const std::vector<GridFunction> q = orthonormalize(sp, all);
  const auto m = static_cast<Eigen::Index>(q.size());

  auto compress = [&](const FormOperator& P) {
    Eigen::MatrixXcd C(m, P.rank());
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index i = 0; i < P.rank(); ++i) C(k, i) = sp.inner_V(P.basis()[i], q[k]);
    return Eigen::MatrixXcd(C * P.s_matrix() * C.adjoint());
  };
  const double dshift = A.alpha_shift() - B.alpha_shift();
  Eigen::MatrixXcd D = compress(A) - compress(B);
  D += dshift * Eigen::MatrixXcd::Identity(m, m);
  const double on_complement = m < sp.dofs() ? std::abs(dshift) : 0.0;
  return std::max(spectral_norm(D), on_complement);
}

}  // namespace maxreg
