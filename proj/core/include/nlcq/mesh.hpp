#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace nlcq {

/// Closed, orientable triangulated surface with outward normals.
///
/// Construction validates the surface: every edge is shared by exactly two
/// triangles with opposite orientation, no triangle is degenerate, and the
/// orientation is made outward (a mesh with negative enclosed volume is
/// flipped).
class SurfaceMesh {
 public:
  using Triangle = std::array<int, 3>;
  using Edge = std::array<int, 2>;

  SurfaceMesh(std::vector<Eigen::Vector3d> vertices, std::vector<Triangle> triangles);

  int vertex_count() const noexcept { return static_cast<int>(vertices_.size()); }
  int triangle_count() const noexcept { return static_cast<int>(triangles_.size()); }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

  const Eigen::Vector3d& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
  const Eigen::Vector3d& corner(int t, int k) const { return vertex(triangle(t)[static_cast<std::size_t>(k)]); }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  /// Edge between local vertices k and (k+1) % 3 of triangle t.
  int triangle_edge(int t, int k) const { return triangle_edges_[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]; }

  const Eigen::Vector3d& normal(int t) const { return normals_[static_cast<std::size_t>(t)]; }
  double area(int t) const { return areas_[static_cast<std::size_t>(t)]; }
  double diameter(int t) const { return diameters_[static_cast<std::size_t>(t)]; }
  Eigen::Vector3d centroid(int t) const;

  /// Largest triangle diameter.
  double mesh_size() const noexcept { return mesh_size_; }
  double surface_area() const noexcept { return surface_area_; }
  double enclosed_volume() const noexcept { return volume_; }
  /// True if construction had to reverse the orientation.
  bool was_flipped() const noexcept { return flipped_; }

 private:
  void compute_geometry();
  void check_closed();

  std::vector<Eigen::Vector3d> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double mesh_size_ = 0.0;
  double surface_area_ = 0.0;
  double volume_ = 0.0;
  bool flipped_ = false;
};

/// Icosahedron refined `subdivisions` times, vertices projected to the sphere.
SurfaceMesh icosphere(int subdivisions, double radius = 1.0);

/// Boundary of [0,1]^3 with a structured `divisions` x `divisions` grid of
/// squares per face, each split into two triangles.
SurfaceMesh unit_cube(int divisions);

/// ASCII OFF: "OFF", then "nv nf ne", vertices, faces (polygons are fanned).
SurfaceMesh read_off(std::istream& in);
/// Gmsh 2.x ASCII; only 3-node triangles (element type 2) are used.
SurfaceMesh read_gmsh(std::istream& in);
/// Dispatches on the extension (.off, .msh).
SurfaceMesh load_mesh(const std::filesystem::path& path);

void write_off(std::ostream& out, const SurfaceMesh& mesh);

/// Euclidean distance from x to the closest point of triangle t.
double distance_to_triangle(const SurfaceMesh& mesh, int t, const Eigen::Vector3d& x);
double distance_to_surface(const SurfaceMesh& mesh, const Eigen::Vector3d& x);

}  // namespace nlcq
