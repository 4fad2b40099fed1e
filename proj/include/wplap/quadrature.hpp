#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wplap/mesh.hpp"

namespace wplap {

/// Per-cell quadrature: global points, barycentric coordinates w.r.t. the
/// owning cell, and positive weights summing to the cell measure.
struct CellQuad {
  Eigen::MatrixXd pts;   // k x 2 (zero-padded in 1D)
  Eigen::MatrixXd bary;  // k x (dim+1)
  Eigen::VectorXd wts;   // k
};

struct QuadratureRule {
  std::vector<CellQuad> cells;

  /// Gauss rules of the given order per cell. Cells touching one of
  /// `singular_pts` are geometrically graded toward the nearest cell vertex
  /// (`grading_levels` bisections); cells touching the mesh boundary are
  /// uniformly subdivided `boundary_levels` times first.
  static QuadratureRule build(const Mesh& mesh,
                              const std::vector<Eigen::Vector2d>& singular_pts = {},
                              int grading_levels = 4,
                              int boundary_levels = 0,
                              int order = 4,
                              int uniform_levels = 0);
};

/// Sum of f(x) over all quadrature points, weighted.
template <class F>
double integrate(const Mesh& mesh, const QuadratureRule& rule, F&& f) {
  double total = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellQuad& q = rule.cells[static_cast<size_t>(c)];
    for (int k = 0; k < q.wts.size(); ++k)
      total += q.wts[k] * f(Eigen::Vector2d(q.pts(k, 0), q.pts(k, 1)));
  }
  return total;
}

/// Gauss-Legendre nodes/weights on [0,1]; n in {2,4,8}.
void gauss_rule_01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace wplap
