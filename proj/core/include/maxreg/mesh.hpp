#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace maxreg {

/// Graded partition of the truncated interval [epsilon, 1] with nodes
/// x_j = epsilon + (1 - epsilon) (j/n)^gamma.
class Mesh {
 public:
  Mesh(double epsilon, int n_cells, double grading_gamma);

  double epsilon() const noexcept { return epsilon_; }
  int n_cells() const noexcept { return n_cells_; }
  double grading_gamma() const noexcept { return gamma_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }
  double cell_length(int j) const { return node(j + 1) - node(j); }

  /// Dimension of the continuous piecewise-linear nodal basis.
  Eigen::Index dofs() const noexcept { return n_cells_ + 1; }

  bool same_as(const Mesh& other) const noexcept;

 private:
  double epsilon_;
  int n_cells_;
  double gamma_;
  std::vector<double> nodes_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Throws PreconditionError unless 0 < epsilon < 1, n_cells >= 2, grading_gamma >= 1.
MeshPtr build_mesh(double epsilon, int n_cells, double grading_gamma);

}  // namespace maxreg
