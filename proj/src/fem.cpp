#include "mtx/fem.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace mtx {

Eigen::SparseMatrix<double> assemble_stiffness(const DomainMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    auto g = mesh.shape_gradients(static_cast<int>(t));
    double a = mesh.triangle_area(static_cast<int>(t));
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], a * dot(g[i], g[j]));
    }
  }
  Eigen::SparseMatrix<double> K(mesh.num_vertices(), mesh.num_vertices());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

struct DirichletSolver::Impl {
  Eigen::SparseMatrix<double> Kff, Kfc;
  std::vector<int> free_of, fixed_idx, free_idx;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

DirichletSolver::DirichletSolver(const Eigen::SparseMatrix<double>& K, const std::vector<char>& fixed)
    : impl_(std::make_unique<Impl>()) {
  const int n = static_cast<int>(K.rows());
  if (static_cast<int>(fixed.size()) != n) throw std::invalid_argument("dirichlet solver: mask size mismatch");
  auto& I = *impl_;
  I.free_of.assign(n, -1);
  std::vector<int> fixed_of(n, -1);
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      fixed_of[i] = static_cast<int>(I.fixed_idx.size());
      I.fixed_idx.push_back(i);
    } else {
      I.free_of[i] = static_cast<int>(I.free_idx.size());
      I.free_idx.push_back(i);
    }
  }
  if (I.free_idx.empty()) throw std::invalid_argument("dirichlet solver: no free unknowns");
  std::vector<Eigen::Triplet<double>> tff, tfc;
  for (int col = 0; col < K.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (I.free_of[r] < 0) continue;
      if (I.free_of[c] >= 0) {
        tff.emplace_back(I.free_of[r], I.free_of[c], it.value());
      } else {
        tfc.emplace_back(I.free_of[r], fixed_of[c], it.value());
      }
    }
  }
  I.Kff.resize(I.free_idx.size(), I.free_idx.size());
  I.Kff.setFromTriplets(tff.begin(), tff.end());
  I.Kfc.resize(I.free_idx.size(), I.fixed_idx.size());
  I.Kfc.setFromTriplets(tfc.begin(), tfc.end());
  I.ldlt.compute(I.Kff);
  if (I.ldlt.info() != Eigen::Success) {
    throw std::runtime_error("dirichlet solver: factorization failed (singular system; every free component must touch a fixed vertex)");
  }
  auto D = I.ldlt.vectorD();
  double dmin = D.minCoeff(), dmax = D.maxCoeff();
  if (!(dmin > 0.0) || dmax / dmin > 1e15) {
    throw std::runtime_error("dirichlet solver: singular system, pivot ratio " + std::to_string(dmax / dmin));
  }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;

std::size_t DirichletSolver::num_free() const { return impl_->free_idx.size(); }

std::vector<double> DirichletSolver::solve(const std::vector<double>& rhs, const std::vector<double>& prescribed) const {
  const auto& I = *impl_;
  Eigen::VectorXd b(I.free_idx.size()), xc(I.fixed_idx.size());
  for (std::size_t k = 0; k < I.free_idx.size(); ++k) b[k] = rhs.empty() ? 0.0 : rhs[I.free_idx[k]];
  for (std::size_t k = 0; k < I.fixed_idx.size(); ++k) xc[k] = prescribed.empty() ? 0.0 : prescribed[I.fixed_idx[k]];
  if (I.fixed_idx.size() > 0) b -= I.Kfc * xc;
  Eigen::VectorXd xf = I.ldlt.solve(b);
  std::vector<double> x(I.free_of.size(), 0.0);
  for (std::size_t k = 0; k < I.free_idx.size(); ++k) x[I.free_idx[k]] = xf[k];
  for (std::size_t k = 0; k < I.fixed_idx.size(); ++k) x[I.fixed_idx[k]] = xc[k];
  return x;
}

double DirichletSolver::residual(const std::vector<double>& x, const std::vector<double>& rhs) const {
  const auto& I = *impl_;
  Eigen::VectorXd xf(I.free_idx.size()), xc(I.fixed_idx.size());
  for (std::size_t k = 0; k < I.free_idx.size(); ++k) xf[k] = x[I.free_idx[k]];
  for (std::size_t k = 0; k < I.fixed_idx.size(); ++k) xc[k] = x[I.fixed_idx[k]];
  Eigen::VectorXd r = I.Kff * xf;
  if (I.fixed_idx.size() > 0) r += I.Kfc * xc;
  double m = 0.0;
  for (std::size_t k = 0; k < I.free_idx.size(); ++k) {
    m = std::max(m, std::abs(r[k] - (rhs.empty() ? 0.0 : rhs[I.free_idx[k]])));
  }
  return m;
}

DirichletSolver interior_solver(const DomainMesh& mesh, const Eigen::SparseMatrix<double>& K) {
  std::vector<char> fixed(mesh.num_vertices(), 0);
  for (int b : mesh.boundary()) fixed[b] = 1;
  return DirichletSolver(K, fixed);
}

double quadratic_form(const Eigen::SparseMatrix<double>& K, const std::vector<double>& x) {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return v.dot(K * v);
}

}  // namespace mtx
