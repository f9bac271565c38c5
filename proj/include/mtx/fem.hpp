#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "mtx/mesh.hpp"

namespace mtx {

// P1 stiffness matrix over all vertices.
Eigen::SparseMatrix<double> assemble_stiffness(const DomainMesh& mesh);

// Solves K x = rhs on the free unknowns with x prescribed on the fixed ones.
class DirichletSolver {
 public:
  DirichletSolver(const Eigen::SparseMatrix<double>& K, const std::vector<char>& fixed);
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;

  std::vector<double> solve(const std::vector<double>& rhs, const std::vector<double>& prescribed) const;
  // max |(K x - rhs)_i| over free unknowns
  double residual(const std::vector<double>& x, const std::vector<double>& rhs) const;
  std::size_t num_free() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Dirichlet solver for the interior unknowns of a mesh (boundary fixed to 0).
DirichletSolver interior_solver(const DomainMesh& mesh, const Eigen::SparseMatrix<double>& K);

double quadratic_form(const Eigen::SparseMatrix<double>& K, const std::vector<double>& x);

}  // namespace mtx
