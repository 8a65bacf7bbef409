#include "maxreg/weighted_spaces.hpp"

#include <algorithm>

#include "maxreg/error.hpp"
#include "maxreg/quadrature.hpp"

namespace maxreg {

GridFunction::GridFunction(MeshPtr mesh, Eigen::VectorXcd coeffs)
    : mesh_(std::move(mesh)), coeffs_(std::move(coeffs)) {
  if (!mesh_) throw PreconditionError("grid function: null mesh");
  if (coeffs_.size() != mesh_->dofs()) {
    throw PreconditionError("grid function: coefficient length does not match mesh basis dimension");
  }
}

GridFunction GridFunction::zeros(MeshPtr mesh) {
  const auto n = mesh->dofs();
  return GridFunction(std::move(mesh), Eigen::VectorXcd::Zero(n));
}

Complex GridFunction::operator()(double x) const {
  const auto nodes = mesh_->nodes();
  if (x <= nodes.front()) return coeffs_[0];
  if (x >= nodes.back()) return coeffs_[coeffs_.size() - 1];
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto j = static_cast<Eigen::Index>(it - nodes.begin()) - 1;
  const double x0 = nodes[static_cast<std::size_t>(j)];
  const double x1 = nodes[static_cast<std::size_t>(j) + 1];
  const double lam = (x - x0) / (x1 - x0);
  return (1.0 - lam) * coeffs_[j] + lam * coeffs_[j + 1];
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_mesh(mesh_, other.mesh_);
  coeffs_ += other.coeffs_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_mesh(mesh_, other.mesh_);
  coeffs_ -= other.coeffs_;
  return *this;
}

GridFunction& GridFunction::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

void require_same_mesh(const MeshPtr& a, const MeshPtr& b) {
  if (!a || !b || !a->same_as(*b)) throw MeshMismatchError("grid functions live on different meshes");
}

SymTridiagonal assemble_gram(const Mesh& mesh, WeightSpec weight) {
  const Eigen::Index n = mesh.dofs();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off = Eigen::VectorXd::Zero(n - 1);
  for (int j = 0; j < mesh.n_cells(); ++j) {
    const double x0 = mesh.node(j);
    const double x1 = mesh.node(j + 1);
    const double h = x1 - x0;
    double mLL = 0.0, mLR = 0.0, mRR = 0.0;
    if (weight.exponent == 0.0) {
      mLL = mRR = h / 3.0;
      mLR = h / 6.0;
    } else {
      mLL = quadrature::integrate([&](double x) { const double l = (x1 - x) / h; return weight(x) * l * l; }, x0, x1);
      mRR = quadrature::integrate([&](double x) { const double r = (x - x0) / h; return weight(x) * r * r; }, x0, x1);
      mLR = quadrature::integrate([&](double x) { return weight(x) * (x1 - x) * (x - x0) / (h * h); }, x0, x1);
    }
    diag[j] += mLL;
    diag[j + 1] += mRR;
    off[j] += mLR;
  }
  return SymTridiagonal(std::move(diag), std::move(off));
}

GramSet assemble_grams(const Mesh& mesh, double v_exponent, MassModel model) {
  GramSet g{assemble_gram(mesh, {0.0}), assemble_gram(mesh, {v_exponent}), assemble_gram(mesh, {-v_exponent})};
  if (model == MassModel::lumped) {
    g.gram_H = g.gram_H.lumped();
    g.gram_V = g.gram_V.lumped();
    g.gram_Vdual = g.gram_Vdual.lumped();
  }
  return g;
}

Complex inner(const SymTridiagonal& gram, const GridFunction& f, const GridFunction& g) {
  require_same_mesh(f.mesh(), g.mesh());
  if (gram.size() != f.size()) throw MeshMismatchError("Gram matrix does not match grid function mesh");
  return gram.form(f.coeffs(), g.coeffs());
}

double norm(const SymTridiagonal& gram, const GridFunction& f) {
  if (gram.size() != f.size()) throw MeshMismatchError("Gram matrix does not match grid function mesh");
  return std::sqrt(std::max(0.0, gram.form(f.coeffs(), f.coeffs()).real()));
}

GridFunction interpolate(const PointFunction& fn, const MeshPtr& mesh) {
  Eigen::VectorXcd c(mesh->dofs());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const Complex v = fn(mesh->node(static_cast<int>(i)));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw PreconditionError("interpolate: non-finite sample at x = " + std::to_string(mesh->node(static_cast<int>(i))));
    }
    c[i] = v;
  }
  return GridFunction(mesh, std::move(c));
}

Complex integrate(const Mesh& mesh, const PointFunction& fn) {
  Complex total = 0.0;
  for (int j = 0; j < mesh.n_cells(); ++j) total += quadrature::integrate(fn, mesh.node(j), mesh.node(j + 1));
  return total;
}

double integrate_real(const Mesh& mesh, const std::function<double(double)>& fn) {
  double total = 0.0;
  for (int j = 0; j < mesh.n_cells(); ++j) total += quadrature::integrate(fn, mesh.node(j), mesh.node(j + 1));
  return total;
}

double weighted_l2_error(const GridFunction& f, const PointFunction& fn, WeightSpec weight) {
  const Mesh& mesh = *f.mesh();
  const auto& c = f.coeffs();
  double total = 0.0;
  for (int j = 0; j < mesh.n_cells(); ++j) {
    const double x0 = mesh.node(j);
    const double x1 = mesh.node(j + 1);
    const double h = x1 - x0;
    const Complex c0 = c[j];
    const Complex c1 = c[j + 1];
    total += quadrature::integrate(
        [&](double x) {
          const double lam = (x - x0) / h;
          return weight(x) * std::norm((1.0 - lam) * c0 + lam * c1 - fn(x));
        },
        x0, x1);
  }
  return std::sqrt(total);
}

GelfandTriple::GelfandTriple(MeshPtr mesh, double v_exponent, MassModel model)
    : mesh_(std::move(mesh)),
      v_exponent_(v_exponent),
      model_(model),
      grams_(assemble_grams(*mesh_, v_exponent, model)),
      factor_V_(grams_.gram_V) {}

SpacesPtr make_spaces(MeshPtr mesh, double v_exponent, MassModel model) {
  return std::make_shared<const GelfandTriple>(std::move(mesh), v_exponent, model);
}

}  // namespace maxreg
