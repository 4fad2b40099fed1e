#include "wplap/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace wplap {

void gauss_rule_01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  // nodes on [-1,1] mapped to [0,1]
  std::vector<double> x, w;
  switch (n) {
    case 2:
      x = {-0.5773502691896257, 0.5773502691896257};
      w = {1.0, 1.0};
      break;
    case 4:
      x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
      w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
      break;
    case 8:
      x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
           0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
      w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
           0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
      break;
    default:
      throw std::invalid_argument("gauss_rule_01: supported orders are 2, 4, 8");
  }
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (x[static_cast<size_t>(i)] + 1.0);
    weights[i] = 0.5 * w[static_cast<size_t>(i)];
  }
}

namespace {

// order-4 rule on the reference triangle, 6 interior points (barycentric + weight)
struct TriPoint {
  double b0, b1, b2, w;
};

const std::array<TriPoint, 6> kTriRule4 = {{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
}};

struct Accum {
  std::vector<Eigen::Vector2d> pts;
  std::vector<Eigen::Vector3d> bary;  // padded for 1D (third comp unused)
  std::vector<double> wts;
};

// barycentric of p w.r.t. triangle (a,b,c)
Eigen::Vector3d tri_bary(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                         const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  Eigen::Matrix2d T;
  T.col(0) = b - a;
  T.col(1) = c - a;
  const Eigen::Vector2d lam = T.inverse() * (p - a);
  return {1.0 - lam[0] - lam[1], lam[0], lam[1]};
}

void emit_segment(Accum& acc, double a, double b, const Eigen::VectorXd& gx,
                  const Eigen::VectorXd& gw, double cell_a, double cell_len) {
  const double len = b - a;
  for (int k = 0; k < gx.size(); ++k) {
    const double x = a + len * gx[k];
    const double t = (x - cell_a) / cell_len;  // bary w.r.t. owning cell
    acc.pts.emplace_back(x, 0.0);
    acc.bary.emplace_back(1.0 - t, t, 0.0);
    acc.wts.push_back(len * gw[k]);
  }
}

void emit_triangle(Accum& acc, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c, const Eigen::Vector2d& A,
                   const Eigen::Vector2d& B, const Eigen::Vector2d& C) {
  const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  for (const auto& q : kTriRule4) {
    const Eigen::Vector2d p = q.b0 * a + q.b1 * b + q.b2 * c;
    acc.pts.push_back(p);
    acc.bary.push_back(tri_bary(p, A, B, C));
    acc.wts.push_back(q.w * area);
  }
}

// graded bisection of [a,b] toward `toward` (= a or b), L levels
void graded_segment(Accum& acc, double a, double b, bool toward_a, int levels,
                    const Eigen::VectorXd& gx, const Eigen::VectorXd& gw, double cell_a,
                    double cell_len) {
  double lo = a, hi = b;
  for (int l = 0; l < levels; ++l) {
    const double mid = 0.5 * (lo + hi);
    if (toward_a) {
      emit_segment(acc, mid, hi, gx, gw, cell_a, cell_len);
      hi = mid;
    } else {
      emit_segment(acc, lo, mid, gx, gw, cell_a, cell_len);
      lo = mid;
    }
  }
  emit_segment(acc, lo, hi, gx, gw, cell_a, cell_len);
}

// graded subdivision of triangle (a,b,c) toward vertex a, L levels
void graded_triangle(Accum& acc, Eigen::Vector2d a, Eigen::Vector2d b, Eigen::Vector2d c,
                     int levels, const Eigen::Vector2d& A, const Eigen::Vector2d& B,
                     const Eigen::Vector2d& C) {
  for (int l = 0; l < levels; ++l) {
    const Eigen::Vector2d ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    emit_triangle(acc, ab, b, bc, A, B, C);
    emit_triangle(acc, ca, bc, c, A, B, C);
    emit_triangle(acc, ab, bc, ca, A, B, C);
    b = ab;
    c = ca;  // recurse into the corner child at a
  }
  emit_triangle(acc, a, b, c, A, B, C);
}

void uniform_triangle(Accum& acc, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const Eigen::Vector2d& c, int levels, const Eigen::Vector2d& A,
                      const Eigen::Vector2d& B, const Eigen::Vector2d& C) {
  if (levels == 0) {
    emit_triangle(acc, a, b, c, A, B, C);
    return;
  }
  const Eigen::Vector2d ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  uniform_triangle(acc, a, ab, ca, levels - 1, A, B, C);
  uniform_triangle(acc, ab, b, bc, levels - 1, A, B, C);
  uniform_triangle(acc, ca, bc, c, levels - 1, A, B, C);
  uniform_triangle(acc, ab, bc, ca, levels - 1, A, B, C);
}

double dist_to_cell(const Mesh& mesh, int c, const Eigen::Vector2d& p) {
  double d = std::numeric_limits<double>::max();
  for (int k = 0; k <= mesh.dim; ++k) d = std::min(d, (mesh.point(mesh.cells(c, k)) - p).norm());
  return d;
}

bool cell_touches_boundary(const Mesh& mesh, int c) {
  for (int k = 0; k <= mesh.dim; ++k)
    if (mesh.is_boundary(mesh.cells(c, k))) return true;
  return false;
}

}  // namespace

QuadratureRule QuadratureRule::build(const Mesh& mesh,
                                     const std::vector<Eigen::Vector2d>& singular_pts,
                                     int grading_levels, int boundary_levels, int order,
                                     int uniform_levels) {
  Eigen::VectorXd gx, gw;
  gauss_rule_01(order == 4 ? 4 : order, gx, gw);

  QuadratureRule rule;
  rule.cells.resize(static_cast<size_t>(mesh.num_cells()));
  const double touch_tol = 1e-12 * (1.0 + mesh.diameter());
  const double near = mesh.min_cell_size() * 0.5 + touch_tol;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Accum acc;
    int graded_vertex = -1;  // local index of vertex to grade toward
    double best = std::numeric_limits<double>::max();
    for (const auto& sp : singular_pts) {
      if (dist_to_cell(mesh, c, sp) > near) continue;
      for (int k = 0; k <= mesh.dim; ++k) {
        const double d = (mesh.point(mesh.cells(c, k)) - sp).norm();
        if (d < best) {
          best = d;
          graded_vertex = k;
        }
      }
    }

    if (mesh.dim == 1) {
      const double a = mesh.vertices(mesh.cells(c, 0), 0);
      const double b = mesh.vertices(mesh.cells(c, 1), 0);
      const double lo = std::min(a, b), hi = std::max(a, b);
      int subdiv = uniform_levels;
      if (boundary_levels > 0 && cell_touches_boundary(mesh, c))
        subdiv = std::max(subdiv, boundary_levels);
      if (graded_vertex >= 0 && grading_levels > 0) {
        const bool toward_lo = mesh.vertices(mesh.cells(c, graded_vertex), 0) <= 0.5 * (lo + hi);
        graded_segment(acc, lo, hi, toward_lo, grading_levels, gx, gw, a, b - a);
      } else if (subdiv > 0) {
        const int pieces = 1 << subdiv;
        for (int s = 0; s < pieces; ++s)
          emit_segment(acc, lo + (hi - lo) * s / pieces, lo + (hi - lo) * (s + 1) / pieces, gx, gw,
                       a, b - a);
      } else {
        emit_segment(acc, lo, hi, gx, gw, a, b - a);
      }
    } else {
      const Eigen::Vector2d A = mesh.point(mesh.cells(c, 0));
      const Eigen::Vector2d B = mesh.point(mesh.cells(c, 1));
      const Eigen::Vector2d C = mesh.point(mesh.cells(c, 2));
      int subdiv = uniform_levels;
      if (boundary_levels > 0 && cell_touches_boundary(mesh, c))
        subdiv = std::max(subdiv, boundary_levels);
      if (graded_vertex >= 0 && grading_levels > 0) {
        std::array<Eigen::Vector2d, 3> v = {A, B, C};
        std::rotate(v.begin(), v.begin() + graded_vertex, v.end());
        graded_triangle(acc, v[0], v[1], v[2], grading_levels, A, B, C);
      } else if (subdiv > 0) {
        uniform_triangle(acc, A, B, C, subdiv, A, B, C);
      } else {
        emit_triangle(acc, A, B, C, A, B, C);
      }
    }

    CellQuad& q = rule.cells[static_cast<size_t>(c)];
    const int k = static_cast<int>(acc.pts.size());
    q.pts.resize(k, 2);
    q.bary.resize(k, mesh.dim + 1);
    q.wts.resize(k);
    for (int i = 0; i < k; ++i) {
      q.pts.row(i) = acc.pts[static_cast<size_t>(i)];
      for (int d = 0; d <= mesh.dim; ++d) q.bary(i, d) = acc.bary[static_cast<size_t>(i)][d];
      q.wts[i] = acc.wts[static_cast<size_t>(i)];
    }
  }
  return rule;
}

}  // namespace wplap
