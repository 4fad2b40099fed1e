#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wplap {

/// Conforming simplicial mesh: segments in 1D, triangles in 2D.
/// Vertices are rows of `vertices` (nv x dim), cells are rows of `cells`
/// (nc x dim+1), oriented so every cell has positive measure.
struct Mesh {
  int dim = 1;
  Eigen::MatrixXd vertices;     // nv x dim
  Eigen::MatrixXi cells;        // nc x (dim+1)
  std::vector<int> boundary;    // ascending boundary vertex ids
  std::vector<char> on_boundary;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_cells() const { return static_cast<int>(cells.rows()); }
  bool is_boundary(int v) const { return on_boundary[static_cast<size_t>(v)] != 0; }

  // Point of vertex i, zero-padded to 2 components.
  Eigen::Vector2d point(int i) const {
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
    for (int d = 0; d < dim; ++d) p[d] = vertices(i, d);
    return p;
  }

  double cell_measure(int c) const;
  double diameter() const;
  double min_cell_size() const;
  // Distance from each vertex to the nearest boundary vertex.
  Eigen::VectorXd boundary_distance() const;
};

struct Domain {
  enum class Kind { Interval, Disk, Polygon };
  Kind kind = Kind::Interval;
  double a = 0.0, b = 1.0;                  // interval endpoints
  double radius = 1.0;                      // disk
  std::vector<Eigen::Vector2d> polygon;     // simple polygon, CCW

  static Domain interval(double a, double b) {
    Domain d; d.kind = Kind::Interval; d.a = a; d.b = b; return d;
  }
  static Domain disk(double r) {
    Domain d; d.kind = Kind::Disk; d.radius = r; return d;
  }
  static Domain make_polygon(std::vector<Eigen::Vector2d> pts) {
    Domain d; d.kind = Kind::Polygon; d.polygon = std::move(pts); return d;
  }
  int dim() const { return kind == Kind::Interval ? 1 : 2; }
  double diameter() const;
};

Mesh build_interval_mesh(double a, double b, int resolution);
Mesh build_disk_mesh(double radius, int resolution);
Mesh build_polygon_mesh(const std::vector<Eigen::Vector2d>& poly, int resolution);
Mesh build_mesh(const Domain& domain, int resolution);

// Flat JSON schema {dimension, vertices, cells, boundary}; see README.
std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& text);

}  // namespace wplap
