#include "nlcq/bem3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>

#include "nlcq/errors.hpp"

namespace nlcq {

namespace {

using Complex = std::complex<double>;
constexpr double kInvFourPi = 0.25 / std::numbers::pi;
constexpr int kMax = TraceSpaces::kMaxLocal;

// Basis data at one quadrature point.
struct PointData {
  const Eigen::Vector3d* point;
  const double* x_basis;
  const double* y_basis;
  const Eigen::Vector3d* y_curls;
};

// Local matrices of one unordered pair (a, b), x on a and y on b.
struct PairBlock {
  Complex v[kMax][kMax];   // X_a x X_b
  Complex kab[kMax][kMax]; // X_a x Y_b
  Complex kba[kMax][kMax]; // X_b x Y_a
  Complex w[kMax][kMax];   // Y_a x Y_b
  Complex k0_sum;          // integral of the kernel alone (constant curls)

  void clear(int lx, int ly) {
    k0_sum = 0.0;
    for (int i = 0; i < ly; ++i) {
      for (int j = 0; j < ly; ++j) {
        w[i][j] = 0.0;
        if (i < lx) {
          kab[i][j] = 0.0;
          kba[i][j] = 0.0;
          if (j < lx) v[i][j] = 0.0;
        }
      }
    }
  }
};

constexpr int kMaxBatch = 8;

struct PairContext {
  const Complex* s;
  int batch;
  int lx;
  int ly;
  Eigen::Vector3d na;
  Eigen::Vector3d nb;
  double nn;
  bool with_k;
  bool constant_curls;
};

inline Complex decay(Complex s, double r) {
  const double magnitude = std::exp(-s.real() * r);
  const double angle = s.imag() * r;
  return {magnitude * std::cos(angle), -magnitude * std::sin(angle)};
}

// Adds one node pair to the blocks of every frequency in the batch.
inline void accumulate(const PairContext& ctx, const PointData& x, const PointData& y, double weight,
                       PairBlock* out) {
  const Eigen::Vector3d d = *x.point - *y.point;
  const double r = d.norm();
  const double g0 = weight * kInvFourPi / r;
  const double gab = ctx.nb.dot(d) / (r * r);
  const double gba = -ctx.na.dot(d) / (r * r);
  double xx[kMax * kMax], xy[kMax * kMax], yx[kMax * kMax], yy[kMax * kMax], cc[kMax * kMax];
  for (int i = 0; i < ctx.lx; ++i) {
    for (int j = 0; j < ctx.lx; ++j) xx[i * kMax + j] = x.x_basis[i] * y.x_basis[j];
    for (int j = 0; j < ctx.ly; ++j) {
      xy[i * kMax + j] = x.x_basis[i] * y.y_basis[j];
      yx[i * kMax + j] = y.x_basis[i] * x.y_basis[j];
    }
  }
  for (int i = 0; i < ctx.ly; ++i) {
    for (int j = 0; j < ctx.ly; ++j) {
      yy[i * kMax + j] = ctx.nn * x.y_basis[i] * y.y_basis[j];
      if (!ctx.constant_curls) cc[i * kMax + j] = x.y_curls[i].dot(y.y_curls[j]);
    }
  }
  for (int b = 0; b < ctx.batch; ++b) {
    const Complex s = ctx.s[b];
    const Complex k0 = decay(s, r) * g0;
    PairBlock& blk = out[b];
    for (int i = 0; i < ctx.lx; ++i) {
      for (int j = 0; j < ctx.lx; ++j) blk.v[i][j] += k0 * xx[i * kMax + j];
    }
    if (ctx.with_k) {
      const Complex dd = k0 * (1.0 + s * r);
      const Complex kab = dd * gab;
      const Complex kba = dd * gba;
      for (int i = 0; i < ctx.lx; ++i) {
        for (int j = 0; j < ctx.ly; ++j) {
          blk.kab[i][j] += kab * xy[i * kMax + j];
          blk.kba[i][j] += kba * yx[i * kMax + j];
        }
      }
    }
    const Complex mass = k0 * (s * s);
    for (int i = 0; i < ctx.ly; ++i) {
      for (int j = 0; j < ctx.ly; ++j) blk.w[i][j] += mass * yy[i * kMax + j];
    }
    if (ctx.constant_curls) {
      blk.k0_sum += k0;
    } else {
      for (int i = 0; i < ctx.ly; ++i) {
        for (int j = 0; j < ctx.ly; ++j) blk.w[i][j] += k0 * cc[i * kMax + j];
      }
    }
  }
}

std::array<int, 3> shared_order(const SurfaceMesh::Triangle& ta, const SurfaceMesh::Triangle& tb,
                                int& shared) {
  // Local indices in a of the vertices shared with b, shared ones first.
  std::array<int, 3> order{};
  int pos = 0;
  for (int k = 0; k < 3; ++k) {
    if (std::find(tb.begin(), tb.end(), ta[static_cast<std::size_t>(k)]) != tb.end()) {
      order[static_cast<std::size_t>(pos++)] = k;
    }
  }
  shared = pos;
  for (int k = 0; k < 3; ++k) {
    if (std::find(tb.begin(), tb.end(), ta[static_cast<std::size_t>(k)]) == tb.end()) {
      order[static_cast<std::size_t>(pos++)] = k;
    }
  }
  return order;
}

int local_index(const SurfaceMesh::Triangle& t, int vertex) {
  for (int k = 0; k < 3; ++k) {
    if (t[static_cast<std::size_t>(k)] == vertex) return k;
  }
  return -1;
}

}  // namespace

GalerkinAssembler::GalerkinAssembler(const TraceSpaces& spaces, int quad_order)
    : spaces_(&spaces), quad_order_(quad_order) {
  if (quad_order < 3) throw ConfigError("quadrature order must be at least 3");
  const auto& mesh = spaces.mesh();
  // Order 3 is the coarse setting; from order 4 on every rule gets extra
  // points, enough for about 1e-6 relative accuracy of the entries at order 4.
  const int extra = quad_order / 4;
  const int far_points = quad_order / 2 + 1 + extra;
  const int near_points = far_points + 1;
  const int singular_points = quad_order / 2 + 2 + 2 * extra;
  far_rule_ = tabulate(collapsed_gauss(far_points));
  near_rule_ = tabulate(collapsed_gauss(near_points));
  identical_nodes_ = sauter_schwab_rule(PairKind::identical, singular_points);
  edge_nodes_ = sauter_schwab_rule(PairKind::edge, singular_points);
  vertex_nodes_ = sauter_schwab_rule(PairKind::vertex, singular_points);

  const int nt = mesh.triangle_count();
  std::vector<Eigen::Vector3d> centroid(static_cast<std::size_t>(nt));
  std::vector<double> radius(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    centroid[static_cast<std::size_t>(t)] = mesh.centroid(t);
    double r = 0.0;
    for (int k = 0; k < 3; ++k) r = std::max(r, (mesh.corner(t, k) - centroid[static_cast<std::size_t>(t)]).norm());
    radius[static_cast<std::size_t>(t)] = r;
  }
  for (int a = 0; a < nt; ++a) {
    const auto& ta = mesh.triangle(a);
    for (int b = a; b < nt; ++b) {
      const auto& tb = mesh.triangle(b);
      int shared = 0;
      const auto order_a = shared_order(ta, tb, shared);
      if (a == b) {
        singular_.push_back({a, b, PairKind::identical, {0, 1, 2}, {0, 1, 2}});
      } else if (shared == 2 || shared == 1) {
        std::array<int, 3> perm_b{};
        for (int k = 0; k < shared; ++k) {
          perm_b[static_cast<std::size_t>(k)] = local_index(tb, ta[static_cast<std::size_t>(order_a[static_cast<std::size_t>(k)])]);
        }
        int pos = shared;
        for (int k = 0; k < 3; ++k) {
          if (std::find(perm_b.begin(), perm_b.begin() + shared, k) == perm_b.begin() + shared) {
            perm_b[static_cast<std::size_t>(pos++)] = k;
          }
        }
        singular_.push_back({a, b, shared == 2 ? PairKind::edge : PairKind::vertex, order_a, perm_b});
      } else if (shared == 3) {
        throw ConfigError("mesh has two triangles with the same vertices");
      } else {
        const double gap = (centroid[static_cast<std::size_t>(a)] - centroid[static_cast<std::size_t>(b)]).norm() -
                           radius[static_cast<std::size_t>(a)] - radius[static_cast<std::size_t>(b)];
        if (gap < std::max(mesh.diameter(a), mesh.diameter(b))) {
          near_.push_back({a, b});
        } else {
          far_.push_back({a, b});
        }
      }
    }
  }
}

GalerkinAssembler::RuleData GalerkinAssembler::tabulate(const TriangleRule& rule) const {
  const auto& mesh = spaces_->mesh();
  const int nt = mesh.triangle_count();
  const int nq = rule.size();
  const int lx = spaces_->local_x();
  const int ly = spaces_->local_y();
  RuleData data;
  data.nodes = nq;
  data.points.resize(static_cast<std::size_t>(nt * nq));
  data.weights.resize(static_cast<std::size_t>(nt * nq));
  data.x_basis.resize(static_cast<std::size_t>(nt * nq * lx));
  data.y_basis.resize(static_cast<std::size_t>(nt * nq * ly));
  data.y_curls.resize(static_cast<std::size_t>(nt * nq * ly));
  for (int t = 0; t < nt; ++t) {
    for (int q = 0; q < nq; ++q) {
      const auto& lam = rule.barycentric[static_cast<std::size_t>(q)];
      const std::size_t idx = static_cast<std::size_t>(t * nq + q);
      data.points[idx] = lam[0] * mesh.corner(t, 0) + lam[1] * mesh.corner(t, 1) + lam[2] * mesh.corner(t, 2);
      data.weights[idx] = rule.weights[static_cast<std::size_t>(q)] * mesh.area(t);
      spaces_->eval_x(lam, data.x_basis.data() + idx * static_cast<std::size_t>(lx));
      spaces_->eval_y(lam, data.y_basis.data() + idx * static_cast<std::size_t>(ly));
      spaces_->curl_y(t, lam, data.y_curls.data() + idx * static_cast<std::size_t>(ly));
    }
  }
  return data;
}

OperatorSet GalerkinAssembler::assemble(Complex s) const {
  const Complex one[1] = {s};
  return std::move(assemble_batch(one).front());
}

std::vector<OperatorSet> GalerkinAssembler::assemble_batch(std::span<const Complex> frequencies) const {
  for (const Complex s : frequencies) {
    if (!(s.real() > 0.0)) throw FrequencyDomainError(s);
  }
  std::vector<OperatorSet> result;
  result.reserve(frequencies.size());
  for (std::size_t first = 0; first < frequencies.size(); first += kMaxBatch) {
    const std::size_t count = std::min<std::size_t>(kMaxBatch, frequencies.size() - first);
    assemble_chunk(frequencies.subspan(first, count), result);
  }
  return result;
}

void GalerkinAssembler::assemble_chunk(std::span<const Complex> freqs, std::vector<OperatorSet>& result) const {
  const auto& mesh = spaces_->mesh();
  const int lx = spaces_->local_x();
  const int ly = spaces_->local_y();
  const int batch = static_cast<int>(freqs.size());
  const std::size_t base = result.size();
  for (const Complex s : freqs) {
    OperatorSet ops;
    ops.s = s;
    ops.V = Eigen::MatrixXcd::Zero(spaces_->dim_x(), spaces_->dim_x());
    ops.K = Eigen::MatrixXcd::Zero(spaces_->dim_x(), spaces_->dim_y());
    ops.W = Eigen::MatrixXcd::Zero(spaces_->dim_y(), spaces_->dim_y());
    result.push_back(std::move(ops));
  }

  std::array<PairBlock, kMaxBatch> blocks;
  const bool constant_curls = spaces_->degree() == 0;
  const Eigen::Vector3d origin = Eigen::Vector3d::Constant(1.0 / 3.0);
  auto clear = [&] {
    for (int b = 0; b < batch; ++b) blocks[static_cast<std::size_t>(b)].clear(lx, ly);
  };
  auto scatter = [&](int a, int b, bool same) {
    const auto xa = spaces_->x_dofs(a);
    const auto xb = spaces_->x_dofs(b);
    const auto ya = spaces_->y_dofs(a);
    const auto yb = spaces_->y_dofs(b);
    double curl_dots[kMax][kMax] = {};
    if (constant_curls) {
      Eigen::Vector3d ca[kMax], cb[kMax];
      spaces_->curl_y(a, origin, ca);
      spaces_->curl_y(b, origin, cb);
      for (int i = 0; i < ly; ++i) {
        for (int j = 0; j < ly; ++j) curl_dots[i][j] = ca[i].dot(cb[j]);
      }
    }
    for (int f = 0; f < batch; ++f) {
      PairBlock& block = blocks[static_cast<std::size_t>(f)];
      OperatorSet& ops = result[base + static_cast<std::size_t>(f)];
      if (constant_curls) {
        for (int i = 0; i < ly; ++i) {
          for (int j = 0; j < ly; ++j) block.w[i][j] += block.k0_sum * curl_dots[i][j];
        }
      }
      if (same) {
        for (int i = 0; i < lx; ++i) {
          for (int j = 0; j < lx; ++j) ops.V(xa[i], xb[j]) += 0.5 * (block.v[i][j] + block.v[j][i]);
        }
        for (int i = 0; i < ly; ++i) {
          for (int j = 0; j < ly; ++j) ops.W(ya[i], yb[j]) += 0.5 * (block.w[i][j] + block.w[j][i]);
        }
        continue;
      }
      for (int i = 0; i < lx; ++i) {
        for (int j = 0; j < lx; ++j) {
          ops.V(xa[i], xb[j]) += block.v[i][j];
          ops.V(xb[j], xa[i]) += block.v[i][j];
        }
        for (int j = 0; j < ly; ++j) {
          ops.K(xa[i], yb[j]) += block.kab[i][j];
          ops.K(xb[i], ya[j]) += block.kba[i][j];
        }
      }
      for (int i = 0; i < ly; ++i) {
        for (int j = 0; j < ly; ++j) {
          ops.W(ya[i], yb[j]) += block.w[i][j];
          ops.W(yb[j], ya[i]) += block.w[i][j];
        }
      }
    }
  };

  auto context = [&](int a, int b) {
    return PairContext{freqs.data(), batch, lx, ly, mesh.normal(a), mesh.normal(b),
                       mesh.normal(a).dot(mesh.normal(b)), a != b, constant_curls};
  };

  auto regular = [&](const RuleData& rule, const std::vector<std::array<int, 2>>& pairs) {
    const int nq = rule.nodes;
    for (const auto& pair : pairs) {
      const int a = pair[0];
      const int b = pair[1];
      const PairContext ctx = context(a, b);
      clear();
      for (int i = 0; i < nq; ++i) {
        const std::size_t ia = static_cast<std::size_t>(a * nq + i);
        const PointData x{&rule.points[ia], &rule.x_basis[ia * static_cast<std::size_t>(lx)],
                          &rule.y_basis[ia * static_cast<std::size_t>(ly)], &rule.y_curls[ia * static_cast<std::size_t>(ly)]};
        for (int j = 0; j < nq; ++j) {
          const std::size_t jb = static_cast<std::size_t>(b * nq + j);
          const PointData y{&rule.points[jb], &rule.x_basis[jb * static_cast<std::size_t>(lx)],
                            &rule.y_basis[jb * static_cast<std::size_t>(ly)], &rule.y_curls[jb * static_cast<std::size_t>(ly)]};
          accumulate(ctx, x, y, rule.weights[ia] * rule.weights[jb], blocks.data());
        }
      }
      scatter(a, b, false);
    }
  };
  regular(far_rule_, far_);
  regular(near_rule_, near_);

  double xb_a[kMax], yb_a[kMax], xb_b[kMax], yb_b[kMax];
  Eigen::Vector3d cu_a[kMax], cu_b[kMax];
  for (const auto& pair : singular_) {
    const auto& nodes = pair.kind == PairKind::identical ? identical_nodes_
                        : pair.kind == PairKind::edge    ? edge_nodes_
                                                         : vertex_nodes_;
    const PairContext ctx = context(pair.a, pair.b);
    const double area2 = mesh.area(pair.a) * mesh.area(pair.b);
    clear();
    for (const auto& node : nodes) {
      Eigen::Vector3d la, lb;
      for (int k = 0; k < 3; ++k) {
        la[pair.perm_a[static_cast<std::size_t>(k)]] = node.x[k];
        lb[pair.perm_b[static_cast<std::size_t>(k)]] = node.y[k];
      }
      const Eigen::Vector3d pa = la[0] * mesh.corner(pair.a, 0) + la[1] * mesh.corner(pair.a, 1) + la[2] * mesh.corner(pair.a, 2);
      const Eigen::Vector3d pb = lb[0] * mesh.corner(pair.b, 0) + lb[1] * mesh.corner(pair.b, 1) + lb[2] * mesh.corner(pair.b, 2);
      spaces_->eval_x(la, xb_a);
      spaces_->eval_y(la, yb_a);
      spaces_->eval_x(lb, xb_b);
      spaces_->eval_y(lb, yb_b);
      if (!constant_curls) {
        spaces_->curl_y(pair.a, la, cu_a);
        spaces_->curl_y(pair.b, lb, cu_b);
      }
      accumulate(ctx, PointData{&pa, xb_a, yb_a, cu_a}, PointData{&pb, xb_b, yb_b, cu_b},
                 node.weight * area2, blocks.data());
    }
    scatter(pair.a, pair.b, pair.a == pair.b);
  }
}

Eigen::RowVectorXcd GalerkinAssembler::single_layer_row(const Eigen::Vector3d& x, Complex s) const {
  if (!(s.real() > 0.0)) throw FrequencyDomainError(s);
  const auto& mesh = spaces_->mesh();
  const int lx = spaces_->local_x();
  const int nq = near_rule_.nodes;
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(spaces_->dim_x());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto dofs = spaces_->x_dofs(t);
    for (int q = 0; q < nq; ++q) {
      const std::size_t idx = static_cast<std::size_t>(t * nq + q);
      const double r = (x - near_rule_.points[idx]).norm();
      if (!(r > 0.0)) throw SingularEvaluation("potential evaluated on the surface");
      const Complex k = decay(s, r) * (near_rule_.weights[idx] * kInvFourPi / r);
      for (int i = 0; i < lx; ++i) row[dofs[static_cast<std::size_t>(i)]] += k * near_rule_.x_basis[idx * static_cast<std::size_t>(lx) + static_cast<std::size_t>(i)];
    }
  }
  return row;
}

Eigen::RowVectorXcd GalerkinAssembler::double_layer_row(const Eigen::Vector3d& x, Complex s) const {
  if (!(s.real() > 0.0)) throw FrequencyDomainError(s);
  const auto& mesh = spaces_->mesh();
  const int ly = spaces_->local_y();
  const int nq = near_rule_.nodes;
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(spaces_->dim_y());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto dofs = spaces_->y_dofs(t);
    for (int q = 0; q < nq; ++q) {
      const std::size_t idx = static_cast<std::size_t>(t * nq + q);
      const Eigen::Vector3d d = x - near_rule_.points[idx];
      const double r = d.norm();
      if (!(r > 0.0)) throw SingularEvaluation("potential evaluated on the surface");
      const Complex k = decay(s, r) * (1.0 + s * r) * (near_rule_.weights[idx] * kInvFourPi / (r * r * r)) *
                        mesh.normal(t).dot(d);
      for (int i = 0; i < ly; ++i) row[dofs[static_cast<std::size_t>(i)]] += k * near_rule_.y_basis[idx * static_cast<std::size_t>(ly) + static_cast<std::size_t>(i)];
    }
  }
  return row;
}

Eigen::MatrixXcd assemble_operator(const TraceSpaces& spaces, Complex s, Operator which, int quad_order) {
  const GalerkinAssembler assembler(spaces, quad_order);
  OperatorSet ops = assembler.assemble(s);
  switch (which) {
    case Operator::V: return std::move(ops.V);
    case Operator::K: return std::move(ops.K);
    case Operator::Kt: return ops.K.transpose();
    case Operator::W: return std::move(ops.W);
  }
  return {};
}

Eigen::MatrixXcd impedance_system(const OperatorSet& ops, const Eigen::MatrixXd& duality, bool interior) {
  const Eigen::Index nx = ops.V.rows();
  const Eigen::Index ny = ops.W.rows();
  if (duality.rows() != nx || duality.cols() != ny) throw DimensionMismatch("duality matrix does not match the operators");
  const double sign = interior ? -1.0 : 1.0;
  Eigen::MatrixXcd b(nx + ny, nx + ny);
  b.topLeftCorner(nx, nx) = ops.s * ops.V;
  b.topRightCorner(nx, ny) = sign * ops.K - 0.5 * duality.cast<Complex>();
  b.bottomLeftCorner(ny, nx) = -sign * ops.K.transpose() + 0.5 * duality.transpose().cast<Complex>();
  b.bottomRightCorner(ny, ny) = ops.W / ops.s;
  return b;
}

FrequencyBlock assemble_B_imp(const TraceSpaces& spaces, Complex s, int quad_order) {
  const GalerkinAssembler assembler(spaces, quad_order);
  OperatorSet ops = assembler.assemble(s);
  FrequencyBlock block;
  block.s = s;
  block.duality = duality_matrix(spaces);
  block.mass_y = mass_matrix_y(spaces);
  block.B_imp = impedance_system(ops, Eigen::MatrixXd(block.duality));
  block.Kt = ops.K.transpose();
  block.V = std::move(ops.V);
  block.K = std::move(ops.K);
  block.W = std::move(ops.W);
  return block;
}

struct SurfaceProjector::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

SurfaceProjector::SurfaceProjector(const TraceSpaces& spaces, int order)
    : spaces_(&spaces), factor_(std::make_unique<Factor>()) {
  const auto& mesh = spaces.mesh();
  const auto rule = triangle_rule(order);
  const int ly = spaces.local_y();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.barycentric[static_cast<std::size_t>(q)];
      points_.push_back(lam[0] * mesh.corner(t, 0) + lam[1] * mesh.corner(t, 1) + lam[2] * mesh.corner(t, 2));
      normals_.push_back(mesh.normal(t));
      weights_.push_back(rule.weights[static_cast<std::size_t>(q)] * mesh.area(t));
      triangle_.push_back(t);
      const std::size_t offset = basis_.size();
      basis_.resize(offset + static_cast<std::size_t>(ly));
      spaces.eval_y(lam, basis_.data() + offset);
    }
  }
  factor_->ldlt.compute(mass_matrix_y(spaces));
  if (factor_->ldlt.info() != Eigen::Success) throw ConfigError("Y_h mass matrix is singular");
}

SurfaceProjector::~SurfaceProjector() = default;
SurfaceProjector::SurfaceProjector(SurfaceProjector&&) noexcept = default;
SurfaceProjector& SurfaceProjector::operator=(SurfaceProjector&&) noexcept = default;

Eigen::VectorXd SurfaceProjector::load(std::span<const double> samples) const {
  if (samples.size() != points_.size()) throw DimensionMismatch("sample count does not match the quadrature points");
  const int ly = spaces_->local_y();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(spaces_->dim_y());
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const auto dofs = spaces_->y_dofs(triangle_[p]);
    const double f = weights_[p] * samples[p];
    for (int i = 0; i < ly; ++i) b[dofs[static_cast<std::size_t>(i)]] += f * basis_[p * static_cast<std::size_t>(ly) + static_cast<std::size_t>(i)];
  }
  return b;
}

Eigen::VectorXd SurfaceProjector::load(const SurfaceFunction& f) const {
  std::vector<double> samples(points_.size());
  for (std::size_t p = 0; p < points_.size(); ++p) samples[p] = f(points_[p]);
  return load(samples);
}

Eigen::VectorXd SurfaceProjector::project(const SurfaceFunction& f) const { return project_load(load(f)); }

Eigen::VectorXd SurfaceProjector::project_load(const Eigen::VectorXd& b) const {
  if (b.size() != spaces_->dim_y()) throw DimensionMismatch("load vector does not match Y_h");
  return factor_->ldlt.solve(b);
}

Eigen::VectorXd SurfaceProjector::y_values(const Eigen::VectorXd& c) const {
  if (c.size() != spaces_->dim_y()) throw DimensionMismatch("coefficient vector does not match Y_h");
  const int ly = spaces_->local_y();
  Eigen::VectorXd values(static_cast<Eigen::Index>(points_.size()));
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const auto dofs = spaces_->y_dofs(triangle_[p]);
    double acc = 0.0;
    for (int i = 0; i < ly; ++i) acc += basis_[p * static_cast<std::size_t>(ly) + static_cast<std::size_t>(i)] * c[dofs[static_cast<std::size_t>(i)]];
    values[static_cast<Eigen::Index>(p)] = acc;
  }
  return values;
}

Eigen::SparseMatrix<double> SurfaceProjector::weighted_mass(std::span<const double> samples) const {
  if (samples.size() != points_.size()) throw DimensionMismatch("sample count does not match the quadrature points");
  const int ly = spaces_->local_y();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(points_.size() * static_cast<std::size_t>(ly * ly));
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const auto dofs = spaces_->y_dofs(triangle_[p]);
    const double f = weights_[p] * samples[p];
    const double* phi = basis_.data() + p * static_cast<std::size_t>(ly);
    for (int i = 0; i < ly; ++i) {
      for (int j = 0; j < ly; ++j) entries.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], f * phi[i] * phi[j]);
    }
  }
  Eigen::SparseMatrix<double> m(spaces_->dim_y(), spaces_->dim_y());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Eigen::VectorXd load_vector_y(const TraceSpaces& spaces, const SurfaceFunction& f, int order) {
  return SurfaceProjector(spaces, order).load(f);
}

Eigen::VectorXd l2_project_Yh(const TraceSpaces& spaces, const SurfaceFunction& f, int order) {
  return SurfaceProjector(spaces, order).project(f);
}

}  // namespace nlcq
