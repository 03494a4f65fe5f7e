#include "nlcq/spaces.hpp"

#include <Eigen/Geometry>

#include "nlcq/errors.hpp"
#include "nlcq/quadrature.hpp"

namespace nlcq {

TraceSpaces::TraceSpaces(const SurfaceMesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
  if (degree != 0 && degree != 1) throw ConfigError("trace space degree must be 0 or 1");
  const int nt = mesh.triangle_count();
  const int lx = local_x();
  const int ly = local_y();
  x_map_.resize(static_cast<std::size_t>(nt * lx));
  y_map_.resize(static_cast<std::size_t>(nt * ly));
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < lx; ++k) x_map_[static_cast<std::size_t>(t * lx + k)] = t * lx + k;
    for (int k = 0; k < 3; ++k) y_map_[static_cast<std::size_t>(t * ly + k)] = mesh.triangle(t)[static_cast<std::size_t>(k)];
    if (degree_ == 1) {
      for (int k = 0; k < 3; ++k) {
        y_map_[static_cast<std::size_t>(t * ly + 3 + k)] = mesh.vertex_count() + mesh.triangle_edge(t, k);
      }
    }
  }
  dim_x_ = static_cast<Eigen::Index>(nt) * lx;
  dim_y_ = mesh.vertex_count() + (degree_ == 1 ? mesh.edge_count() : 0);

  gradients_.resize(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& n = mesh.normal(t);
    const double twice_area = 2.0 * mesh.area(t);
    for (int k = 0; k < 3; ++k) {
      const auto& b = mesh.corner(t, (k + 1) % 3);
      const auto& c = mesh.corner(t, (k + 2) % 3);
      gradients_[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = n.cross(c - b) / twice_area;
    }
  }
}

std::span<const int> TraceSpaces::x_dofs(int t) const {
  return {x_map_.data() + static_cast<std::ptrdiff_t>(t) * local_x(), static_cast<std::size_t>(local_x())};
}

std::span<const int> TraceSpaces::y_dofs(int t) const {
  return {y_map_.data() + static_cast<std::ptrdiff_t>(t) * local_y(), static_cast<std::size_t>(local_y())};
}

void TraceSpaces::eval_x(const Eigen::Vector3d& lambda, double* out) const {
  if (degree_ == 0) {
    out[0] = 1.0;
  } else {
    for (int k = 0; k < 3; ++k) out[k] = lambda[k];
  }
}

void TraceSpaces::eval_y(const Eigen::Vector3d& lambda, double* out) const {
  if (degree_ == 0) {
    for (int k = 0; k < 3; ++k) out[k] = lambda[k];
  } else {
    for (int k = 0; k < 3; ++k) {
      out[k] = lambda[k] * (2.0 * lambda[k] - 1.0);
      out[3 + k] = 4.0 * lambda[k] * lambda[(k + 1) % 3];
    }
  }
}

void TraceSpaces::curl_y(int t, const Eigen::Vector3d& lambda, Eigen::Vector3d* out) const {
  const auto& grad = gradients_[static_cast<std::size_t>(t)];
  const auto& n = mesh_->normal(t);
  if (degree_ == 0) {
    for (int k = 0; k < 3; ++k) out[k] = n.cross(grad[static_cast<std::size_t>(k)]);
  } else {
    for (int k = 0; k < 3; ++k) {
      const int k1 = (k + 1) % 3;
      out[k] = (4.0 * lambda[k] - 1.0) * n.cross(grad[static_cast<std::size_t>(k)]);
      out[3 + k] = 4.0 * n.cross(lambda[k1] * grad[static_cast<std::size_t>(k)] +
                                 lambda[k] * grad[static_cast<std::size_t>(k1)]);
    }
  }
}

double TraceSpaces::x_value(const Eigen::VectorXd& c, int t, const Eigen::Vector3d& lambda) const {
  double basis[kMaxLocal];
  eval_x(lambda, basis);
  double acc = 0.0;
  const auto dofs = x_dofs(t);
  for (std::size_t k = 0; k < dofs.size(); ++k) acc += basis[k] * c[dofs[k]];
  return acc;
}

double TraceSpaces::y_value(const Eigen::VectorXd& c, int t, const Eigen::Vector3d& lambda) const {
  double basis[kMaxLocal];
  eval_y(lambda, basis);
  double acc = 0.0;
  const auto dofs = y_dofs(t);
  for (std::size_t k = 0; k < dofs.size(); ++k) acc += basis[k] * c[dofs[k]];
  return acc;
}

Eigen::VectorXd TraceSpaces::x_constant() const { return Eigen::VectorXd::Ones(dim_x_); }

Eigen::VectorXd TraceSpaces::y_constant() const {
  // Lagrange bases (P1 vertices, P2 vertices and edge midpoints) sum to one.
  return Eigen::VectorXd::Ones(dim_y_);
}

namespace {

enum class Side { x, y };

Eigen::SparseMatrix<double> gram(const TraceSpaces& spaces, Side row_side, Side col_side) {
  const auto& mesh = spaces.mesh();
  // products of at most two quadratics
  const auto rule = triangle_rule(4);
  const Eigen::Index rows = row_side == Side::x ? spaces.dim_x() : spaces.dim_y();
  const Eigen::Index cols = col_side == Side::x ? spaces.dim_x() : spaces.dim_y();
  std::vector<Eigen::Triplet<double>> entries;
  double row_basis[TraceSpaces::kMaxLocal];
  double col_basis[TraceSpaces::kMaxLocal];
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto row_dofs = row_side == Side::x ? spaces.x_dofs(t) : spaces.y_dofs(t);
    const auto col_dofs = col_side == Side::x ? spaces.x_dofs(t) : spaces.y_dofs(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_dofs.size()),
                                                  static_cast<Eigen::Index>(col_dofs.size()));
    for (int q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.barycentric[static_cast<std::size_t>(q)];
      if (row_side == Side::x) spaces.eval_x(lam, row_basis); else spaces.eval_y(lam, row_basis);
      if (col_side == Side::x) spaces.eval_x(lam, col_basis); else spaces.eval_y(lam, col_basis);
      const double w = rule.weights[static_cast<std::size_t>(q)] * mesh.area(t);
      for (Eigen::Index i = 0; i < local.rows(); ++i) {
        for (Eigen::Index j = 0; j < local.cols(); ++j) local(i, j) += w * row_basis[i] * col_basis[j];
      }
    }
    for (Eigen::Index i = 0; i < local.rows(); ++i) {
      for (Eigen::Index j = 0; j < local.cols(); ++j) {
        entries.emplace_back(row_dofs[static_cast<std::size_t>(i)], col_dofs[static_cast<std::size_t>(j)], local(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> duality_matrix(const TraceSpaces& spaces) { return gram(spaces, Side::x, Side::y); }
Eigen::SparseMatrix<double> mass_matrix_x(const TraceSpaces& spaces) { return gram(spaces, Side::x, Side::x); }
Eigen::SparseMatrix<double> mass_matrix_y(const TraceSpaces& spaces) { return gram(spaces, Side::y, Side::y); }

}  // namespace nlcq
