#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nlcq/mesh.hpp"

namespace nlcq {

/// Galerkin trace spaces on a surface mesh:
///   X_h - discontinuous polynomials of degree q (Neumann density phi),
///   Y_h - continuous polynomials of degree q + 1 (velocity trace psi),
/// with q in {0, 1}.
///
/// Local numbering follows the triangle's vertex order. Y_h of degree 2 has
/// the vertex functions first and then the edge functions of the edges
/// (0,1), (1,2), (2,0).
class TraceSpaces {
 public:
  static constexpr int kMaxLocal = 6;

  TraceSpaces(const SurfaceMesh& mesh, int degree);

  const SurfaceMesh& mesh() const noexcept { return *mesh_; }
  int degree() const noexcept { return degree_; }
  Eigen::Index dim_x() const noexcept { return dim_x_; }
  Eigen::Index dim_y() const noexcept { return dim_y_; }
  int local_x() const noexcept { return degree_ == 0 ? 1 : 3; }
  int local_y() const noexcept { return degree_ == 0 ? 3 : 6; }

  std::span<const int> x_dofs(int t) const;
  std::span<const int> y_dofs(int t) const;

  void eval_x(const Eigen::Vector3d& lambda, double* out) const;
  void eval_y(const Eigen::Vector3d& lambda, double* out) const;
  /// Surface curls n x grad of the local Y functions on triangle t.
  void curl_y(int t, const Eigen::Vector3d& lambda, Eigen::Vector3d* out) const;

  /// Value of the X_h / Y_h function with coefficients c at a point of t.
  double x_value(const Eigen::VectorXd& c, int t, const Eigen::Vector3d& lambda) const;
  double y_value(const Eigen::VectorXd& c, int t, const Eigen::Vector3d& lambda) const;

  /// Coefficients of the constant function 1.
  Eigen::VectorXd x_constant() const;
  Eigen::VectorXd y_constant() const;

 private:
  const SurfaceMesh* mesh_;
  int degree_;
  Eigen::Index dim_x_ = 0;
  Eigen::Index dim_y_ = 0;
  std::vector<int> x_map_;
  std::vector<int> y_map_;
  std::vector<std::array<Eigen::Vector3d, 3>> gradients_;  // grad lambda_k per triangle
};

/// <x_i, y_j> (dim_x x dim_y).
Eigen::SparseMatrix<double> duality_matrix(const TraceSpaces& spaces);
/// <x_i, x_j>.
Eigen::SparseMatrix<double> mass_matrix_x(const TraceSpaces& spaces);
/// <y_i, y_j>.
Eigen::SparseMatrix<double> mass_matrix_y(const TraceSpaces& spaces);

}  // namespace nlcq
