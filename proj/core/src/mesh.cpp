#include "nlcq/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "nlcq/errors.hpp"

namespace nlcq {

SurfaceMesh::SurfaceMesh(std::vector<Eigen::Vector3d> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw ConfigError("mesh has no triangles");
  const int nv = vertex_count();
  for (const auto& tri : triangles_) {
    for (int v : tri) {
      if (v < 0 || v >= nv) throw ConfigError("triangle references a vertex out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw ConfigError("triangle with repeated vertices");
    }
  }
  check_closed();
  compute_geometry();
  if (volume_ < 0.0) {
    for (auto& tri : triangles_) std::swap(tri[1], tri[2]);
    flipped_ = true;
    check_closed();
    compute_geometry();
  }
}

void SurfaceMesh::check_closed() {
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[static_cast<std::size_t>(k)];
      const int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (!directed.emplace(std::pair{a, b}, static_cast<int>(t)).second) {
        throw ConfigError("mesh is not orientable or has an edge shared by more than two triangles");
      }
    }
  }
  edges_.clear();
  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, int> edge_index;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[static_cast<std::size_t>(k)];
      const int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (!directed.contains({b, a})) throw ConfigError("mesh is not closed (boundary edge found)");
      const std::pair key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_index.emplace(key, static_cast<int>(edges_.size()));
      if (inserted) edges_.push_back({key.first, key.second});
      triangle_edges_[t][static_cast<std::size_t>(k)] = it->second;
    }
  }
}

void SurfaceMesh::compute_geometry() {
  const std::size_t nt = triangles_.size();
  normals_.resize(nt);
  areas_.resize(nt);
  diameters_.resize(nt);
  mesh_size_ = 0.0;
  surface_area_ = 0.0;
  volume_ = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& a = vertex(triangles_[t][0]);
    const auto& b = vertex(triangles_[t][1]);
    const auto& c = vertex(triangles_[t][2]);
    const Eigen::Vector3d cross = (b - a).cross(c - a);
    const double twice_area = cross.norm();
    areas_[t] = 0.5 * twice_area;
    diameters_[t] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    mesh_size_ = std::max(mesh_size_, diameters_[t]);
    surface_area_ += areas_[t];
    volume_ += a.dot(b.cross(c)) / 6.0;
    normals_[t] = twice_area > 0.0 ? Eigen::Vector3d(cross / twice_area) : Eigen::Vector3d::Zero();
  }
  for (std::size_t t = 0; t < nt; ++t) {
    if (!(areas_[t] > 1e-12 * mesh_size_ * mesh_size_)) {
      throw ConfigError("degenerate triangle " + std::to_string(t));
    }
  }
}

Eigen::Vector3d SurfaceMesh::centroid(int t) const {
  return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0;
}

SurfaceMesh icosphere(int subdivisions, double radius) {
  if (subdivisions < 0) throw ConfigError("icosphere subdivisions must be non-negative");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
      {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<SurfaceMesh::Triangle> f = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::pair key{std::min(a, b), std::max(a, b)};
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      v.push_back((v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<SurfaceMesh::Triangle> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& x : v) x *= radius;
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh unit_cube(int divisions) {
  if (divisions < 1) throw ConfigError("cube divisions must be at least 1");
  const int n = divisions;
  std::map<std::array<int, 3>, int> lattice;
  std::vector<Eigen::Vector3d> v;
  auto vertex_id = [&](const std::array<int, 3>& ijk) {
    auto [it, inserted] = lattice.emplace(ijk, static_cast<int>(v.size()));
    if (inserted) v.emplace_back(ijk[0] / double(n), ijk[1] / double(n), ijk[2] / double(n));
    return it->second;
  };
  std::vector<SurfaceMesh::Triangle> f;
  for (int axis = 0; axis < 3; ++axis) {
    const int u_axis = (axis + 1) % 3;
    const int w_axis = (axis + 2) % 3;
    for (int side = 0; side <= 1; ++side) {
      Eigen::Vector3d outward = Eigen::Vector3d::Zero();
      outward[axis] = side == 0 ? -1.0 : 1.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto at = [&](int a, int b) {
            std::array<int, 3> ijk{};
            ijk[static_cast<std::size_t>(axis)] = side * n;
            ijk[static_cast<std::size_t>(u_axis)] = a;
            ijk[static_cast<std::size_t>(w_axis)] = b;
            return vertex_id(ijk);
          };
          const int p00 = at(i, j);
          const int p10 = at(i + 1, j);
          const int p11 = at(i + 1, j + 1);
          const int p01 = at(i, j + 1);
          for (SurfaceMesh::Triangle tri : {SurfaceMesh::Triangle{p00, p10, p11},
                                            SurfaceMesh::Triangle{p00, p11, p01}}) {
            const auto& a = v[static_cast<std::size_t>(tri[0])];
            const auto& b = v[static_cast<std::size_t>(tri[1])];
            const auto& c = v[static_cast<std::size_t>(tri[2])];
            if ((b - a).cross(c - a).dot(outward) < 0.0) std::swap(tri[1], tri[2]);
            f.push_back(tri);
          }
        }
      }
    }
  }
  return SurfaceMesh(std::move(v), std::move(f));
}

namespace {

// Next non-empty, non-comment line.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

SurfaceMesh read_off(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ConfigError("OFF file is empty");
  const auto start = line.find_first_not_of(" \t");
  if (line.compare(start, 3, "OFF") != 0) throw ConfigError("OFF file must start with 'OFF'");
  std::istringstream header(line.substr(start + 3));
  int nv = -1;
  int nf = -1;
  if (!(header >> nv >> nf)) {
    if (!next_line(in, line)) throw ConfigError("OFF file truncated before counts");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ConfigError("OFF counts line is malformed");
  }
  if (nv <= 0 || nf <= 0) throw ConfigError("OFF file has no vertices or faces");
  std::vector<Eigen::Vector3d> v(static_cast<std::size_t>(nv));
  for (auto& x : v) {
    if (!next_line(in, line)) throw ConfigError("OFF file truncated in vertex list");
    std::istringstream row(line);
    if (!(row >> x[0] >> x[1] >> x[2])) throw ConfigError("malformed OFF vertex line");
  }
  std::vector<SurfaceMesh::Triangle> f;
  for (int i = 0; i < nf; ++i) {
    if (!next_line(in, line)) throw ConfigError("OFF file truncated in face list");
    std::istringstream row(line);
    int k = 0;
    if (!(row >> k) || k < 3) throw ConfigError("malformed OFF face line");
    std::vector<int> ids(static_cast<std::size_t>(k));
    for (auto& id : ids) {
      if (!(row >> id)) throw ConfigError("malformed OFF face line");
    }
    for (int j = 1; j + 1 < k; ++j) f.push_back({ids[0], ids[static_cast<std::size_t>(j)], ids[static_cast<std::size_t>(j + 1)]});
  }
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh read_gmsh(std::istream& in) {
  std::string line;
  std::unordered_map<long, int> node_index;
  std::vector<Eigen::Vector3d> v;
  std::vector<SurfaceMesh::Triangle> f;
  bool seen_format = false;
  while (next_line(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      if (!next_line(in, line)) throw ConfigError("truncated $MeshFormat");
      std::istringstream row(line);
      double version = 0.0;
      int file_type = -1;
      row >> version >> file_type;
      if (version < 2.0 || version >= 3.0) throw ConfigError("only Gmsh 2.x meshes are supported");
      if (file_type != 0) throw ConfigError("only ASCII Gmsh meshes are supported");
      seen_format = true;
    } else if (line.rfind("$Nodes", 0) == 0) {
      if (!next_line(in, line)) throw ConfigError("truncated $Nodes");
      const long count = std::stol(line);
      for (long i = 0; i < count; ++i) {
        if (!next_line(in, line)) throw ConfigError("truncated $Nodes");
        std::istringstream row(line);
        long id = 0;
        Eigen::Vector3d x;
        if (!(row >> id >> x[0] >> x[1] >> x[2])) throw ConfigError("malformed Gmsh node line");
        node_index[id] = static_cast<int>(v.size());
        v.push_back(x);
      }
    } else if (line.rfind("$Elements", 0) == 0) {
      if (!next_line(in, line)) throw ConfigError("truncated $Elements");
      const long count = std::stol(line);
      for (long i = 0; i < count; ++i) {
        if (!next_line(in, line)) throw ConfigError("truncated $Elements");
        std::istringstream row(line);
        long id = 0;
        int type = 0;
        int tags = 0;
        if (!(row >> id >> type >> tags)) throw ConfigError("malformed Gmsh element line");
        for (int k = 0; k < tags; ++k) {
          long skip = 0;
          row >> skip;
        }
        if (type != 2) continue;
        SurfaceMesh::Triangle tri{};
        for (auto& corner : tri) {
          long node = 0;
          if (!(row >> node)) throw ConfigError("malformed Gmsh triangle");
          auto it = node_index.find(node);
          if (it == node_index.end()) throw ConfigError("Gmsh triangle references unknown node");
          corner = it->second;
        }
        f.push_back(tri);
      }
    }
  }
  if (!seen_format) throw ConfigError("missing $MeshFormat section");
  return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".off" || ext == ".OFF") return read_off(in);
  if (ext == ".msh") return read_gmsh(in);
  throw ConfigError("unsupported mesh format '" + ext + "' (expected .off or .msh)");
}

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
  out.precision(17);
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const auto& x = mesh.vertex(i);
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
}

double distance_to_triangle(const SurfaceMesh& mesh, int t, const Eigen::Vector3d& p) {
  // Closest point by Voronoi region classification (Ericson, RTCD 5.1.5).
  const Eigen::Vector3d& a = mesh.corner(t, 0);
  const Eigen::Vector3d& b = mesh.corner(t, 1);
  const Eigen::Vector3d& c = mesh.corner(t, 2);
  const Eigen::Vector3d ab = b - a;
  const Eigen::Vector3d ac = c - a;
  const Eigen::Vector3d ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + ab * v + ac * w)).norm();
}

double distance_to_surface(const SurfaceMesh& mesh, const Eigen::Vector3d& x) {
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.triangle_count(); ++t) best = std::min(best, distance_to_triangle(mesh, t, x));
  return best;
}

}  // namespace nlcq
