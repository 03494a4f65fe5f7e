#pragma once

#include <vector>

#include <Eigen/Core>

namespace nlcq {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int points);

/// Rule on a triangle in barycentric coordinates, weights summing to one
/// (multiply by the area).
struct TriangleRule {
  std::vector<Eigen::Vector3d> barycentric;
  std::vector<double> weights;

  int size() const noexcept { return static_cast<int>(weights.size()); }
};

/// Collapsed (Duffy) tensor Gauss rule exact for polynomials of degree `order`.
TriangleRule triangle_rule(int order);

/// Collapsed tensor rule with `points` Gauss points per direction (points^2
/// nodes, exact up to degree 2 points - 2).
TriangleRule collapsed_gauss(int points);

enum class PairKind { identical, edge, vertex, regular };

/// One node of a relative-coordinate rule for a pair of triangles. Both
/// points are barycentric coordinates with respect to the vertex order
/// (A, B, C) of each triangle, where the triangles share A (vertex case),
/// the edge AB (edge case) or all three vertices (identical case). Weights
/// sum to one; multiply by |T| |T'|.
struct PairNode {
  Eigen::Vector3d x;
  Eigen::Vector3d y;
  double weight;
};

/// Sauter-Schwab rules with `points` Gauss points per direction of the
/// four-dimensional unit cube. The transformed integrands of kernels with a
/// 1/r singularity are smooth, so the rules converge exponentially.
std::vector<PairNode> sauter_schwab_rule(PairKind kind, int points);

}  // namespace nlcq
