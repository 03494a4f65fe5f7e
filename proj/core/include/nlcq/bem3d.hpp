#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nlcq/quadrature.hpp"
#include "nlcq/spaces.hpp"

namespace nlcq {

enum class Operator { V, K, Kt, W };

/// Galerkin matrices at one frequency. Kt is K transposed and is not stored.
///   V  (dim_x x dim_x): <V x_j, x_i>
///   K  (dim_x x dim_y): <K y_j, x_i>
///   W  (dim_y x dim_y): <W y_j, y_i>, regularized through surface curls
struct OperatorSet {
  std::complex<double> s;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd K;
  Eigen::MatrixXcd W;
};

/// Precomputes the pair classification and quadrature data of a mesh so that
/// the operators can be assembled cheaply at many frequencies.
///
/// Touching pairs (common triangle, edge or vertex) use Sauter-Schwab rules,
/// pairs closer than one diameter an upgraded tensor Gauss rule, all others
/// the base tensor Gauss rule. V and W are filled pairwise and mirrored, so
/// they are exactly symmetric.
class GalerkinAssembler {
 public:
  GalerkinAssembler(const TraceSpaces& spaces, int quad_order);

  const TraceSpaces& spaces() const noexcept { return *spaces_; }
  int quad_order() const noexcept { return quad_order_; }

  /// Throws FrequencyDomainError unless Re s > 0.
  OperatorSet assemble(std::complex<double> s) const;
  /// Several frequencies at once; the quadrature geometry is shared.
  std::vector<OperatorSet> assemble_batch(std::span<const std::complex<double>> frequencies) const;

  /// Single-layer potential row: S_j(x) = int Phi(x - y) x_j(y) dy.
  Eigen::RowVectorXcd single_layer_row(const Eigen::Vector3d& x, std::complex<double> s) const;
  /// Double-layer potential row: D_j(x) = int d/dn_y Phi(x - y) y_j(y) dy.
  Eigen::RowVectorXcd double_layer_row(const Eigen::Vector3d& x, std::complex<double> s) const;

  std::size_t singular_pair_count() const noexcept { return singular_.size(); }
  std::size_t near_pair_count() const noexcept { return near_.size(); }
  std::size_t far_pair_count() const noexcept { return far_.size(); }

  /// Tabulated values of the bases on one triangle at the nodes of a rule.
  struct RuleData {
    int nodes = 0;
    std::vector<Eigen::Vector3d> points;   // triangle-major
    std::vector<double> weights;           // includes the area
    std::vector<double> x_basis;           // nodes * local_x per triangle
    std::vector<double> y_basis;           // nodes * local_y per triangle
    std::vector<Eigen::Vector3d> y_curls;  // nodes * local_y per triangle
  };

  struct SingularPair {
    int a;
    int b;
    PairKind kind;
    std::array<int, 3> perm_a;  // local vertex of a at position k of the rule's (A, B, C)
    std::array<int, 3> perm_b;
  };

 private:
  RuleData tabulate(const TriangleRule& rule) const;
  void assemble_chunk(std::span<const std::complex<double>> frequencies, std::vector<OperatorSet>& result) const;

  const TraceSpaces* spaces_;
  int quad_order_;
  RuleData far_rule_;
  RuleData near_rule_;
  std::vector<std::array<int, 2>> far_;
  std::vector<std::array<int, 2>> near_;
  std::vector<SingularPair> singular_;
  std::vector<PairNode> identical_nodes_;
  std::vector<PairNode> edge_nodes_;
  std::vector<PairNode> vertex_nodes_;
};

/// Single Galerkin matrix; see OperatorSet for the shapes (Kt: dim_y x dim_x).
Eigen::MatrixXcd assemble_operator(const TraceSpaces& spaces, std::complex<double> s,
                                   Operator which, int quad_order);

/// Impedance block system
///   B_imp(s) = [[s V, K - M/2], [-Kt + M^T/2, W / s]]
/// with the duality matrix M = M_XY.
struct FrequencyBlock {
  std::complex<double> s;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd K;
  Eigen::MatrixXcd Kt;
  Eigen::MatrixXcd W;
  Eigen::SparseMatrix<double> duality;
  Eigen::SparseMatrix<double> mass_y;
  Eigen::MatrixXcd B_imp;
};

FrequencyBlock assemble_B_imp(const TraceSpaces& spaces, std::complex<double> s, int quad_order);

/// Dense block operator from an operator set:
///   exterior: [[s V, K - M/2], [-K^T + M^T/2, W / s]]
///   interior: [[s V, -K - M/2], [K^T + M^T/2, W / s]]
Eigen::MatrixXcd impedance_system(const OperatorSet& ops, const Eigen::MatrixXd& duality,
                                  bool interior = false);

using SurfaceFunction = std::function<double(const Eigen::Vector3d&)>;

/// <f, y_j> by a tensor Gauss rule of the given polynomial order.
Eigen::VectorXd load_vector_y(const TraceSpaces& spaces, const SurfaceFunction& f, int order = 6);

/// Y_h coefficients of the L2 projection of f: M_YY c = <f, y_j>.
Eigen::VectorXd l2_project_Yh(const TraceSpaces& spaces, const SurfaceFunction& f, int order = 6);

/// Reusable form of load_vector_y / l2_project_Yh with the quadrature points
/// and the factorized mass matrix kept between calls.
class SurfaceProjector {
 public:
  explicit SurfaceProjector(const TraceSpaces& spaces, int order = 6);
  ~SurfaceProjector();
  SurfaceProjector(SurfaceProjector&&) noexcept;
  SurfaceProjector& operator=(SurfaceProjector&&) noexcept;

  const std::vector<Eigen::Vector3d>& points() const noexcept { return points_; }
  /// Normal of the triangle carrying each point.
  const std::vector<Eigen::Vector3d>& normals() const noexcept { return normals_; }

  /// Load vector from samples of f at points().
  Eigen::VectorXd load(std::span<const double> samples) const;
  Eigen::VectorXd load(const SurfaceFunction& f) const;
  Eigen::VectorXd project(const SurfaceFunction& f) const;
  Eigen::VectorXd project_load(const Eigen::VectorXd& load) const;

  /// Values of the Y_h function with coefficients c at points().
  Eigen::VectorXd y_values(const Eigen::VectorXd& c) const;
  /// <g(values) y_i, y_j>-type products: sum_q w_q f_q y_i(q) y_j(q).
  Eigen::SparseMatrix<double> weighted_mass(std::span<const double> samples) const;

 private:
  struct Factor;
  const TraceSpaces* spaces_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<double> weights_;
  std::vector<double> basis_;  // per point, local_y values
  std::vector<int> triangle_;  // per point
  std::unique_ptr<Factor> factor_;
};

}  // namespace nlcq
