#include "maxreg/mesh.hpp"

#include <cmath>
#include <string>

#include "maxreg/error.hpp"

namespace maxreg {

Mesh::Mesh(double epsilon, int n_cells, double grading_gamma)
    : epsilon_(epsilon), n_cells_(n_cells), gamma_(grading_gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw PreconditionError("mesh: epsilon must lie in (0,1), got " + std::to_string(epsilon));
  }
  if (n_cells < 2) throw PreconditionError("mesh: n_cells must be >= 2");
  if (!(grading_gamma >= 1.0)) throw PreconditionError("mesh: grading_gamma must be >= 1");

  nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
  for (int j = 0; j <= n_cells; ++j) {
    const double s = static_cast<double>(j) / n_cells;
    nodes_[static_cast<std::size_t>(j)] = epsilon + (1.0 - epsilon) * std::pow(s, grading_gamma);
  }
  nodes_.front() = epsilon;
  nodes_.back() = 1.0;
  for (int j = 0; j < n_cells; ++j) {
    if (!(cell_length(j) > 0.0)) {
      throw PreconditionError("mesh: degenerate cell (grading too strong for n_cells)");
    }
  }
}

bool Mesh::same_as(const Mesh& other) const noexcept {
  return this == &other || nodes_ == other.nodes_;
}

MeshPtr build_mesh(double epsilon, int n_cells, double grading_gamma) {
  return std::make_shared<const Mesh>(epsilon, n_cells, grading_gamma);
}

}  // namespace maxreg
