#include "wplap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

namespace wplap {

double Mesh::cell_measure(int c) const {
  if (dim == 1) {
    return std::abs(vertices(cells(c, 1), 0) - vertices(cells(c, 0), 0));
  }
  const Eigen::Vector2d a = point(cells(c, 0));
  const Eigen::Vector2d b = point(cells(c, 1));
  const Eigen::Vector2d d = point(cells(c, 2));
  return 0.5 * ((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x());
}

double Mesh::diameter() const {
  Eigen::VectorXd lo = vertices.colwise().minCoeff();
  Eigen::VectorXd hi = vertices.colwise().maxCoeff();
  return (hi - lo).norm();
}

double Mesh::min_cell_size() const {
  double h = std::numeric_limits<double>::max();
  for (int c = 0; c < num_cells(); ++c) {
    if (dim == 1) {
      h = std::min(h, cell_measure(c));
    } else {
      for (int e = 0; e < 3; ++e) {
        const Eigen::Vector2d a = point(cells(c, e));
        const Eigen::Vector2d b = point(cells(c, (e + 1) % 3));
        h = std::min(h, (a - b).norm());
      }
    }
  }
  return h;
}

Eigen::VectorXd Mesh::boundary_distance() const {
  Eigen::VectorXd dist(num_vertices());
  for (int i = 0; i < num_vertices(); ++i) {
    double d = std::numeric_limits<double>::max();
    const Eigen::Vector2d p = point(i);
    for (int b : boundary) d = std::min(d, (p - point(b)).norm());
    dist[i] = d;
  }
  return dist;
}

double Domain::diameter() const {
  switch (kind) {
    case Kind::Interval: return std::abs(b - a);
    case Kind::Disk: return 2.0 * radius;
    case Kind::Polygon: {
      double d = 0.0;
      for (size_t i = 0; i < polygon.size(); ++i)
        for (size_t j = i + 1; j < polygon.size(); ++j)
          d = std::max(d, (polygon[i] - polygon[j]).norm());
      return d;
    }
  }
  return 0.0;
}

Mesh build_interval_mesh(double a, double b, int resolution) {
  if (resolution < 2) throw std::invalid_argument("interval mesh: resolution must be >= 2");
  if (!(b > a)) throw std::invalid_argument("interval mesh: need b > a");
  Mesh m;
  m.dim = 1;
  const int nv = resolution + 1;
  m.vertices.resize(nv, 1);
  for (int i = 0; i < nv; ++i) m.vertices(i, 0) = a + (b - a) * i / resolution;
  m.cells.resize(resolution, 2);
  for (int c = 0; c < resolution; ++c) {
    m.cells(c, 0) = c;
    m.cells(c, 1) = c + 1;
  }
  m.boundary = {0, resolution};
  m.on_boundary.assign(static_cast<size_t>(nv), 0);
  m.on_boundary[0] = 1;
  m.on_boundary[static_cast<size_t>(resolution)] = 1;
  return m;
}

namespace {

void finalize_2d(Mesh& m) {
  // orient cells positively
  for (int c = 0; c < m.num_cells(); ++c) {
    if (m.cell_measure(c) < 0) std::swap(m.cells(c, 1), m.cells(c, 2));
    if (m.cell_measure(c) <= 0) throw std::runtime_error("degenerate cell in mesh");
  }
  // boundary = vertices of edges owned by exactly one cell
  std::map<std::pair<int, int>, int> edge_count;
  for (int c = 0; c < m.num_cells(); ++c) {
    for (int e = 0; e < 3; ++e) {
      int u = m.cells(c, e), v = m.cells(c, (e + 1) % 3);
      if (u > v) std::swap(u, v);
      edge_count[{u, v}]++;
    }
  }
  std::set<int> bnd;
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      bnd.insert(edge.first);
      bnd.insert(edge.second);
    }
  }
  m.boundary.assign(bnd.begin(), bnd.end());
  m.on_boundary.assign(static_cast<size_t>(m.num_vertices()), 0);
  for (int b : m.boundary) m.on_boundary[static_cast<size_t>(b)] = 1;
}

}  // namespace

Mesh build_disk_mesh(double radius, int resolution) {
  if (resolution < 2) throw std::invalid_argument("disk mesh: resolution must be >= 2");
  if (!(radius > 0)) throw std::invalid_argument("disk mesh: radius must be positive");
  Mesh m;
  m.dim = 2;
  // concentric rings: ring k has 6k vertices at radius k*R/resolution
  std::vector<int> ring_start(resolution + 1);
  int nv = 1;
  ring_start[0] = 0;
  for (int k = 1; k <= resolution; ++k) {
    ring_start[k] = nv;
    nv += 6 * k;
  }
  m.vertices.resize(nv, 2);
  m.vertices.row(0).setZero();
  for (int k = 1; k <= resolution; ++k) {
    const double r = radius * k / resolution;
    const int count = 6 * k;
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * M_PI * j / count;
      m.vertices(ring_start[k] + j, 0) = r * std::cos(th);
      m.vertices(ring_start[k] + j, 1) = r * std::sin(th);
    }
  }
  std::vector<Eigen::Vector3i> tris;
  // inner fan
  for (int j = 0; j < 6; ++j) tris.emplace_back(0, ring_start[1] + j, ring_start[1] + (j + 1) % 6);
  // annuli: merge walk by angle between ring k (inner, 6k pts) and k+1 (outer)
  for (int k = 1; k < resolution; ++k) {
    const int mi = 6 * k, mo = 6 * (k + 1);
    const int si = ring_start[k], so = ring_start[k + 1];
    int i = 0, o = 0;
    while (i < mi || o < mo) {
      const double next_i = (i < mi) ? (2.0 * M_PI * (i + 1) / mi) : 1e300;
      const double next_o = (o < mo) ? (2.0 * M_PI * (o + 1) / mo) : 1e300;
      if (next_o <= next_i) {
        tris.emplace_back(si + (i % mi), so + (o % mo), so + ((o + 1) % mo));
        ++o;
      } else {
        tris.emplace_back(si + (i % mi), so + (o % mo), si + ((i + 1) % mi));
        ++i;
      }
    }
  }
  m.cells.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t) m.cells.row(static_cast<int>(t)) = tris[t];
  finalize_2d(m);
  return m;
}

namespace {

bool is_axis_rectangle(const std::vector<Eigen::Vector2d>& p) {
  if (p.size() != 4) return false;
  std::set<double> xs, ys;
  for (const auto& q : p) {
    xs.insert(q.x());
    ys.insert(q.y());
  }
  return xs.size() == 2 && ys.size() == 2;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

bool point_in_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// ear clipping for a simple polygon (CCW)
std::vector<Eigen::Vector3i> ear_clip(std::vector<Eigen::Vector2d> poly) {
  double area2 = 0.0;
  for (size_t i = 0; i < poly.size(); ++i)
    area2 += cross2(poly[i], poly[(i + 1) % poly.size()]);
  std::vector<int> idx(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  if (area2 < 0) std::reverse(idx.begin(), idx.end());

  std::vector<Eigen::Vector3i> tris;
  int guard = 0;
  while (idx.size() > 3) {
    if (++guard > 10000) throw std::runtime_error("polygon triangulation failed (not simple?)");
    bool clipped = false;
    for (size_t i = 0; i < idx.size(); ++i) {
      const int ia = idx[(i + idx.size() - 1) % idx.size()];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % idx.size()];
      const Eigen::Vector2d &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (cross2(b - a, c - a) <= 1e-14) continue;  // reflex or collinear
      bool contains = false;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        if (point_in_triangle(poly[j], a, b, c)) { contains = true; break; }
      }
      if (contains) continue;
      tris.emplace_back(ia, ib, ic);
      idx.erase(idx.begin() + static_cast<long>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw std::runtime_error("polygon triangulation stalled");
  }
  tris.emplace_back(idx[0], idx[1], idx[2]);
  return tris;
}

Mesh refine_uniform(const Mesh& coarse) {
  Mesh m;
  m.dim = 2;
  std::map<std::pair<int, int>, int> midpoint;
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(static_cast<size_t>(coarse.num_vertices()) * 4);
  for (int i = 0; i < coarse.num_vertices(); ++i) verts.push_back(coarse.point(i));
  auto mid = [&](int u, int v) {
    auto key = std::minmax(u, v);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back(0.5 * (coarse.point(u) + coarse.point(v)));
    midpoint[key] = id;
    return id;
  };
  std::vector<Eigen::Vector3i> tris;
  for (int c = 0; c < coarse.num_cells(); ++c) {
    const int a = coarse.cells(c, 0), b = coarse.cells(c, 1), d = coarse.cells(c, 2);
    const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
    tris.emplace_back(a, ab, da);
    tris.emplace_back(ab, b, bd);
    tris.emplace_back(da, bd, d);
    tris.emplace_back(ab, bd, da);
  }
  m.vertices.resize(static_cast<int>(verts.size()), 2);
  for (size_t i = 0; i < verts.size(); ++i) m.vertices.row(static_cast<int>(i)) = verts[i];
  m.cells.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t) m.cells.row(static_cast<int>(t)) = tris[t];
  finalize_2d(m);
  return m;
}

}  // namespace

Mesh build_polygon_mesh(const std::vector<Eigen::Vector2d>& poly, int resolution) {
  if (poly.size() < 3) throw std::invalid_argument("polygon mesh: need at least 3 vertices");
  if (resolution < 1) throw std::invalid_argument("polygon mesh: resolution must be >= 1");
  if (is_axis_rectangle(poly)) {
    // structured grid, two triangles per quad
    double x0 = poly[0].x(), x1 = poly[0].x(), y0 = poly[0].y(), y1 = poly[0].y();
    for (const auto& q : poly) {
      x0 = std::min(x0, q.x()); x1 = std::max(x1, q.x());
      y0 = std::min(y0, q.y()); y1 = std::max(y1, q.y());
    }
    Mesh m;
    m.dim = 2;
    const int n = resolution;
    m.vertices.resize((n + 1) * (n + 1), 2);
    auto vid = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        m.vertices(vid(i, j), 0) = x0 + (x1 - x0) * i / n;
        m.vertices(vid(i, j), 1) = y0 + (y1 - y0) * j / n;
      }
    m.cells.resize(2 * n * n, 3);
    int t = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m.cells.row(t++) << vid(i, j), vid(i + 1, j), vid(i + 1, j + 1);
        m.cells.row(t++) << vid(i, j), vid(i + 1, j + 1), vid(i, j + 1);
      }
    finalize_2d(m);
    return m;
  }
  Mesh m;
  m.dim = 2;
  m.vertices.resize(static_cast<int>(poly.size()), 2);
  for (size_t i = 0; i < poly.size(); ++i) m.vertices.row(static_cast<int>(i)) = poly[i];
  auto tris = ear_clip(poly);
  m.cells.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t) m.cells.row(static_cast<int>(t)) = tris[t];
  finalize_2d(m);
  int levels = 0;
  while ((1 << levels) < resolution) ++levels;
  for (int l = 0; l < levels; ++l) m = refine_uniform(m);
  return m;
}

Mesh build_mesh(const Domain& domain, int resolution) {
  switch (domain.kind) {
    case Domain::Kind::Interval: return build_interval_mesh(domain.a, domain.b, resolution);
    case Domain::Kind::Disk: return build_disk_mesh(domain.radius, resolution);
    case Domain::Kind::Polygon: return build_polygon_mesh(domain.polygon, resolution);
  }
  throw std::invalid_argument("unknown domain kind");
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["dimension"] = mesh.dim;
  nlohmann::json verts = nlohmann::json::array();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int d = 0; d < mesh.dim; ++d) row.push_back(mesh.vertices(i, d));
    verts.push_back(row);
  }
  j["vertices"] = verts;
  nlohmann::json cells = nlohmann::json::array();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k <= mesh.dim; ++k) row.push_back(mesh.cells(c, k));
    cells.push_back(row);
  }
  j["cells"] = cells;
  j["boundary"] = mesh.boundary;
  return j.dump(2);
}

Mesh mesh_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Mesh m;
  m.dim = j.at("dimension").get<int>();
  if (m.dim != 1 && m.dim != 2) throw std::invalid_argument("mesh json: dimension must be 1 or 2");
  const auto& verts = j.at("vertices");
  m.vertices.resize(static_cast<int>(verts.size()), m.dim);
  for (size_t i = 0; i < verts.size(); ++i)
    for (int d = 0; d < m.dim; ++d) m.vertices(static_cast<int>(i), d) = verts[i][static_cast<size_t>(d)].get<double>();
  const auto& cells = j.at("cells");
  m.cells.resize(static_cast<int>(cells.size()), m.dim + 1);
  for (size_t c = 0; c < cells.size(); ++c)
    for (int k = 0; k <= m.dim; ++k) m.cells(static_cast<int>(c), k) = cells[c][static_cast<size_t>(k)].get<int>();
  m.boundary = j.at("boundary").get<std::vector<int>>();
  m.on_boundary.assign(static_cast<size_t>(m.num_vertices()), 0);
  for (int b : m.boundary) m.on_boundary[static_cast<size_t>(b)] = 1;
  for (int c = 0; c < m.num_cells(); ++c)
    if (m.cell_measure(c) <= 0) throw std::invalid_argument("mesh json: nonpositive cell measure");
  return m;
}

}  // namespace wplap
