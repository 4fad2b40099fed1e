#include "wplap/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wplap {

WeightSpec WeightSpec::constant(double v, int dim) {
  if (!(v > 0)) throw std::invalid_argument("constant weight must be positive");
  WeightSpec w;
  w.kind = Kind::Constant;
  w.value = v;
  w.dim = dim;
  return w;
}

WeightSpec WeightSpec::power(const Eigen::Vector2d& center, double alpha, int dim) {
  WeightSpec w;
  w.kind = Kind::Power;
  w.center = center;
  w.alpha = alpha;
  w.dim = dim;
  return w;
}

WeightSpec WeightSpec::tabulated(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd nodal) {
  if (!mesh) throw std::invalid_argument("tabulated weight needs a mesh");
  if (nodal.size() != mesh->num_vertices())
    throw std::invalid_argument("tabulated weight: nodal size mismatch");
  if (nodal.minCoeff() <= 0) throw std::invalid_argument("tabulated weight values must be > 0");
  WeightSpec w;
  w.kind = Kind::Tabulated;
  w.dim = mesh->dim;
  w.mesh = std::move(mesh);
  w.nodal = std::move(nodal);
  return w;
}

namespace {

double interp_tabulated(const Mesh& mesh, const Eigen::VectorXd& nodal,
                        const Eigen::Vector2d& x) {
  if (mesh.dim == 1) {
    const int nv = mesh.num_vertices();
    // vertices are ascending for interval meshes
    int lo = 0, hi = nv - 1;
    const double xa = mesh.vertices(0, 0), xb = mesh.vertices(nv - 1, 0);
    const double xc = std::clamp(x.x(), xa, xb);
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (mesh.vertices(mid, 0) <= xc ? lo : hi) = mid;
    }
    const double x0 = mesh.vertices(lo, 0), x1 = mesh.vertices(hi, 0);
    const double t = (x1 > x0) ? (xc - x0) / (x1 - x0) : 0.0;
    return (1 - t) * nodal[lo] + t * nodal[hi];
  }
  // locate containing triangle; clamp to nearest cell when outside
  double best_neg = -std::numeric_limits<double>::max();
  double best_val = nodal.mean();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Vector2d a = mesh.point(mesh.cells(c, 0));
    const Eigen::Vector2d b = mesh.point(mesh.cells(c, 1));
    const Eigen::Vector2d d = mesh.point(mesh.cells(c, 2));
    Eigen::Matrix2d T;
    T.col(0) = b - a;
    T.col(1) = d - a;
    const Eigen::Vector2d lam = T.inverse() * (x - a);
    const double l0 = 1.0 - lam[0] - lam[1];
    const double worst = std::min({l0, lam[0], lam[1]});
    const double val = l0 * nodal[mesh.cells(c, 0)] + lam[0] * nodal[mesh.cells(c, 1)] +
                       lam[1] * nodal[mesh.cells(c, 2)];
    if (worst >= -1e-12) return val;
    if (worst > best_neg) {
      best_neg = worst;
      best_val = val;
    }
  }
  return best_val;
}

}  // namespace

double eval_weight(const WeightSpec& w, const Eigen::Vector2d& x) {
  switch (w.kind) {
    case WeightSpec::Kind::Constant:
      return w.value;
    case WeightSpec::Kind::Power: {
      const double r = (x - w.center).head(w.dim == 1 ? 1 : 2).norm();
      if (r == 0.0) {
        if (w.alpha < 0) throw std::domain_error("power weight evaluated at its singular point");
        return w.alpha == 0 ? 1.0 : 0.0;
      }
      return std::pow(r, w.alpha);
    }
    case WeightSpec::Kind::Tabulated:
      return interp_tabulated(*w.mesh, w.nodal, x);
  }
  throw std::logic_error("unknown weight kind");
}

double eval_weight_pow(const WeightSpec& w, double q, const Eigen::Vector2d& x) {
  switch (w.kind) {
    case WeightSpec::Kind::Constant:
      return std::pow(w.value, q);
    case WeightSpec::Kind::Power: {
      const double r = (x - w.center).head(w.dim == 1 ? 1 : 2).norm();
      if (r == 0.0) {
        if (w.alpha * q < 0) throw std::domain_error("power weight evaluated at its singular point");
        return w.alpha * q == 0 ? 1.0 : 0.0;
      }
      return std::pow(r, w.alpha * q);
    }
    case WeightSpec::Kind::Tabulated:
      return std::pow(interp_tabulated(*w.mesh, w.nodal, x), q);
  }
  throw std::logic_error("unknown weight kind");
}

namespace {

constexpr int kShellsPerLevel = 10;  // dyadic shells added per refinement level
constexpr int kAngular = 128;

struct Gauss {
  Eigen::VectorXd x, w;
  Gauss() { gauss_rule_01(8, x, w); }
};
const Gauss& g8() {
  static const Gauss g;
  return g;
}

// integral of s^beta * s^(N-1) over [a, b], 0 <= a < b, by Gauss-8
double power_segment(double beta, int N, double a, double b) {
  const auto& g = g8();
  const double len = b - a;
  double sum = 0.0;
  for (int k = 0; k < g.x.size(); ++k) {
    const double s = a + len * g.x[k];
    sum += len * g.w[k] * std::pow(s, beta + (N - 1));
  }
  return sum;
}

// one-sided integral of s^beta s^{N-1} ds over (0, L], resolved level by level:
// partials[l] covers (L*2^{-10(l+1)}, L].
std::vector<double> one_sided_partials(double beta, int N, double L, int max_levels) {
  std::vector<double> partials;
  double acc = 0.0;
  double hi = L;
  for (int l = 0; l < max_levels; ++l) {
    for (int j = 0; j < kShellsPerLevel; ++j) {
      const double lo = hi * 0.5;
      acc += power_segment(beta, N, lo, hi);
      hi = lo;
    }
    partials.push_back(acc);
    if (!std::isfinite(acc)) break;
  }
  return partials;
}

RefinementResult judge(const std::vector<double>& partials, double rel_tol) {
  RefinementResult r;
  r.levels = static_cast<int>(partials.size());
  if (partials.empty()) return r;
  if (partials.size() == 1) {
    r.value = partials[0];
    r.converged = std::isfinite(partials[0]);
    return r;
  }
  for (size_t l = 0; l + 1 < partials.size(); ++l) {
    const double inc = std::abs(partials[l + 1] - partials[l]);
    if (std::isfinite(partials[l + 1]) &&
        inc <= rel_tol * std::max(std::abs(partials[l + 1]), 1e-300)) {
      r.value = partials[l + 1];
      r.converged = true;
      r.levels = static_cast<int>(l + 2);
      r.last_increment = inc;
      return r;
    }
  }
  // not settled within budget: Cauchy if the increments decay geometrically
  const size_t n = partials.size();
  if (!std::isfinite(partials[n - 1])) return r;
  double worst_ratio = 0.0;
  for (size_t l = n - 3; l + 1 < n; ++l) {
    const double prev = std::abs(partials[l] - partials[l - 1]);
    const double cur = std::abs(partials[l + 1] - partials[l]);
    worst_ratio = std::max(worst_ratio, prev > 0 ? cur / prev : 0.0);
  }
  r.last_increment = std::abs(partials[n - 1] - partials[n - 2]);
  if (worst_ratio < 0.5) {
    r.converged = true;
    // geometric tail estimate
    r.value = partials[n - 1] + r.last_increment * worst_ratio / (1.0 - worst_ratio);
  } else {
    r.value = partials[n - 1];
  }
  return r;
}

// smooth composite integration of w^q over a 1D interval, doubling pieces per level
RefinementResult smooth_interval(const WeightSpec& w, double q, double lo, double hi,
                                 double rel_tol, int max_levels) {
  const auto& g = g8();
  std::vector<double> partials;
  for (int l = 0; l < std::min(max_levels, 8); ++l) {
    const int pieces = 1 << l;
    double acc = 0.0;
    for (int s = 0; s < pieces; ++s) {
      const double a = lo + (hi - lo) * s / pieces;
      const double b = lo + (hi - lo) * (s + 1) / pieces;
      for (int k = 0; k < g.x.size(); ++k)
        acc += (b - a) * g.w[k] *
               eval_weight_pow(w, q, Eigen::Vector2d(a + (b - a) * g.x[k], 0.0));
    }
    partials.push_back(acc);
    if (partials.size() >= 2 &&
        std::abs(partials.back() - partials[partials.size() - 2]) <=
            rel_tol * std::max(std::abs(partials.back()), 1e-300))
      break;
  }
  return judge(partials, rel_tol);
}

// tabulated weights: integrate w^q * indicator(ball) over the weight's own
// mesh, refining by uniform subdivision
RefinementResult tabulated_ball(const WeightSpec& w, double q, const Ball& ball,
                                double rel_tol) {
  const Mesh& mesh = *w.mesh;
  std::vector<double> partials;
  for (int l = 1; l <= 4; ++l) {
    const QuadratureRule quad = QuadratureRule::build(mesh, {}, 0, 0, 4, l);
    double acc = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const CellQuad& cq = quad.cells[static_cast<size_t>(c)];
      for (int k = 0; k < cq.wts.size(); ++k) {
        const Eigen::Vector2d x(cq.pts(k, 0), cq.pts(k, 1));
        if ((x - ball.center).head(mesh.dim == 1 ? 1 : 2).norm() > ball.radius) continue;
        double val = 0.0;
        for (int d = 0; d <= mesh.dim; ++d) val += cq.bary(k, d) * w.nodal[mesh.cells(c, d)];
        acc += cq.wts[k] * std::pow(val, q);
      }
    }
    partials.push_back(acc);
  }
  return judge(partials, rel_tol);
}

// smooth polar integration of w^q over a 2D ball (no singular point inside)
RefinementResult smooth_disk(const WeightSpec& w, double q, const Ball& ball, double rel_tol,
                             int max_levels) {
  const auto& g = g8();
  std::vector<double> partials;
  for (int l = 0; l < std::min(max_levels, 6); ++l) {
    const int pieces = 1 << l;
    const int m = 64 << std::min(l, 4);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * M_PI * j / m;
      const Eigen::Vector2d e(std::cos(th), std::sin(th));
      double ray = 0.0;
      for (int s = 0; s < pieces; ++s) {
        const double a = ball.radius * s / pieces;
        const double b = ball.radius * (s + 1) / pieces;
        for (int k = 0; k < g.x.size(); ++k) {
          const double r = a + (b - a) * g.x[k];
          ray += (b - a) * g.w[k] * r * eval_weight_pow(w, q, ball.center + r * e);
        }
      }
      acc += ray * (2.0 * M_PI / m);
    }
    partials.push_back(acc);
    if (partials.size() >= 2 &&
        std::abs(partials.back() - partials[partials.size() - 2]) <=
            rel_tol * std::max(std::abs(partials.back()), 1e-300))
      break;
  }
  return judge(partials, rel_tol);
}

}  // namespace

RefinementResult integrate_ball_pow(const WeightSpec& w, double q, const Ball& ball,
                                    double rel_tol, int max_levels) {
  if (!(ball.radius > 0)) {
    RefinementResult r;
    r.converged = true;
    return r;  // empty region
  }
  if (w.kind == WeightSpec::Kind::Constant) {
    RefinementResult r;
    r.value = std::pow(w.value, q) * ball.volume();
    r.converged = true;
    return r;
  }
  if (w.kind == WeightSpec::Kind::Tabulated) return tabulated_ball(w, q, ball, rel_tol);

  const double beta = w.alpha * q;
  if (ball.dim == 1) {
    const double lo = ball.center.x() - ball.radius;
    const double hi = ball.center.x() + ball.radius;
    const double x0 = w.center.x();
    if (x0 < lo || x0 > hi) return smooth_interval(w, q, lo, hi, rel_tol, max_levels);
    // split at the singular point (or one-sided if it is an endpoint)
    std::vector<std::vector<double>> sides;
    if (x0 - lo > 0) sides.push_back(one_sided_partials(beta, 1, x0 - lo, max_levels));
    if (hi - x0 > 0) sides.push_back(one_sided_partials(beta, 1, hi - x0, max_levels));
    std::vector<double> partials;
    size_t nl = 0;
    for (const auto& s : sides) nl = std::max(nl, s.size());
    for (size_t l = 0; l < nl; ++l) {
      double acc = 0.0;
      for (const auto& s : sides) acc += s[std::min(l, s.size() - 1)];
      partials.push_back(acc);
    }
    return judge(partials, rel_tol);
  }

  // 2D power weight
  const Eigen::Vector2d delta = ball.center - w.center;
  const double dist = delta.norm();
  if (dist > 1.25 * ball.radius) return smooth_disk(w, q, ball, rel_tol, max_levels);

  // polar around the singular point; per-ray limits against the circle
  struct Ray {
    double upper = 0.0, lower = 0.0;
  };
  std::vector<Ray> rays(kAngular);
  for (int j = 0; j < kAngular; ++j) {
    const double th = 2.0 * M_PI * (j + 0.5) / kAngular;
    const Eigen::Vector2d e(std::cos(th), std::sin(th));
    const double b = delta.dot(e);
    const double disc = b * b + ball.radius * ball.radius - dist * dist;
    if (disc <= 0) continue;
    const double root = std::sqrt(disc);
    rays[static_cast<size_t>(j)].upper = std::max(b + root, 0.0);
    rays[static_cast<size_t>(j)].lower = std::max(b - root, 0.0);
  }
  const double dth = 2.0 * M_PI / kAngular;
  std::vector<double> ray_acc(kAngular, 0.0);
  std::vector<double> ray_cut(kAngular);  // current lower end of resolved range
  for (int j = 0; j < kAngular; ++j) ray_cut[static_cast<size_t>(j)] = rays[static_cast<size_t>(j)].upper;
  std::vector<double> partials;
  for (int l = 0; l < max_levels; ++l) {
    for (int j = 0; j < kAngular; ++j) {
      const Ray& ray = rays[static_cast<size_t>(j)];
      if (ray.upper <= 0) continue;
      double hi2 = ray_cut[static_cast<size_t>(j)];
      const double target = std::max(ray.lower, ray.upper * std::pow(0.5, kShellsPerLevel * (l + 1)));
      for (int s = 0; s < kShellsPerLevel && hi2 > target * (1.0 + 1e-14); ++s) {
        const double lo2 = std::max(target, hi2 * 0.5);
        ray_acc[static_cast<size_t>(j)] += power_segment(beta, 2, lo2, hi2);
        hi2 = lo2;
      }
      ray_cut[static_cast<size_t>(j)] = hi2;
    }
    double acc = 0.0;
    for (int j = 0; j < kAngular; ++j) acc += ray_acc[static_cast<size_t>(j)] * dth;
    partials.push_back(acc);
    if (!std::isfinite(acc)) break;
    if (partials.size() >= 2 &&
        std::abs(partials.back() - partials[partials.size() - 2]) <=
            rel_tol * std::max(std::abs(partials.back()), 1e-300))
      break;
  }
  return judge(partials, rel_tol);
}

double weighted_measure(const WeightSpec& w, const Ball& region) {
  const RefinementResult r = integrate_ball_pow(w, 1.0, region);
  if (!r.converged) throw std::runtime_error("weighted measure: integral diverged numerically");
  return r.value;
}

double weighted_measure(const WeightSpec& w, const Mesh& region, const QuadratureRule& quad) {
  return integrate(region, quad, [&](const Eigen::Vector2d& x) { return eval_weight(w, x); });
}

ApEstimate estimate_ap_constant(const WeightSpec& w, double p, const std::vector<Ball>& balls) {
  if (!(p > 1)) throw std::invalid_argument("estimate_ap_constant: need p > 1");
  if (balls.empty()) throw std::invalid_argument("estimate_ap_constant: empty ball family");
  ApEstimate est;
  est.balls_tested = static_cast<int>(balls.size());
  est.constant_estimate = 0.0;
  const double dual = -1.0 / (p - 1.0);
  for (const Ball& ball : balls) {
    const RefinementResult iw = integrate_ball_pow(w, 1.0, ball);
    const RefinementResult idual = integrate_ball_pow(w, dual, ball);
    if (!iw.converged || !idual.converged) {
      est.in_ap = false;
      est.per_ball_ratio.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double vol = ball.volume();
    const double ratio = (iw.value / vol) * std::pow(idual.value / vol, p - 1.0);
    est.per_ball_ratio.push_back(ratio);
    if (ratio > est.constant_estimate) {
      est.constant_estimate = ratio;
      est.worst_ball = ball;
    }
  }
  if (!est.in_ap) est.constant_estimate = std::numeric_limits<double>::infinity();
  return est;
}

std::vector<Ball> default_ball_family(const WeightSpec& w, double d0, int count) {
  if (count < 1) throw std::invalid_argument("default_ball_family: count must be >= 1");
  const Eigen::Vector2d c0 =
      (w.kind == WeightSpec::Kind::Power) ? w.center : Eigen::Vector2d::Zero();
  std::vector<Ball> balls;
  const int radii = 8;
  int k = 0;
  while (static_cast<int>(balls.size()) < count) {
    const int j = k % radii;
    const int off = (k / radii) % 5;
    const double r = d0 * std::pow(2.0, -10.0 + 9.0 * j / (radii - 1));
    Ball b;
    b.dim = w.dim;
    b.radius = r;
    b.center = c0;
    const double shift = (off == 0) ? 0.0 : (off == 1 ? 0.6 : (off == 2 ? 1.2 : (off == 3 ? 0.3 : 2.0)));
    if (w.dim == 1) {
      b.center.x() += shift * r * ((k % 2 == 0) ? 1.0 : -1.0);
    } else {
      const double ang = 0.7 * k;
      b.center += shift * r * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    }
    balls.push_back(b);
    ++k;
  }
  return balls;
}

bool power_weight_ap_range(double alpha, int N, double p) {
  if (N < 1 || !(p > 1)) throw std::invalid_argument("power_weight_ap_range: need N >= 1, p > 1");
  return -static_cast<double>(N) < alpha && alpha < N * (p - 1.0);
}

AsMembership check_as_membership(const WeightSpec& w, double s, double p, int N,
                                 const Domain& domain) {
  AsMembership out;
  out.s_valid = (s >= 1.0 / (p - 1.0) - 1e-12) && (s > static_cast<double>(N) / p);
  RefinementResult r;
  switch (domain.kind) {
    case Domain::Kind::Interval: {
      Ball b;
      b.dim = 1;
      b.center = Eigen::Vector2d(0.5 * (domain.a + domain.b), 0.0);
      b.radius = 0.5 * (domain.b - domain.a);
      r = integrate_ball_pow(w, -s, b);
      break;
    }
    case Domain::Kind::Disk: {
      Ball b;
      b.dim = 2;
      b.center = Eigen::Vector2d::Zero();
      b.radius = domain.radius;
      r = integrate_ball_pow(w, -s, b);
      break;
    }
    case Domain::Kind::Polygon: {
      const Mesh mesh = build_polygon_mesh(domain.polygon, 16);
      std::vector<double> partials;
      for (int levels = 4; levels <= 10; levels += 3) {
        const QuadratureRule quad = QuadratureRule::build(mesh, w.singular_points(), levels);
        partials.push_back(
            integrate(mesh, quad, [&](const Eigen::Vector2d& x) { return eval_weight_pow(w, -s, x); }));
      }
      r = judge(partials, 1e-6);
      break;
    }
  }
  out.integral = r.value;
  out.integral_converged = r.converged;
  bool range_ok = true;
  if (w.kind == WeightSpec::Kind::Power) range_ok = power_weight_ap_range(w.alpha, N, p);
  if (w.kind == WeightSpec::Kind::Tabulated) out.note = "tabulated weight: A_p assumed, uncertified";
  out.member = r.converged && range_ok;
  if (!r.converged) out.note = "integral of w^{-s} diverged under refinement";
  return out;
}

DoublingCheck doubling_check(const WeightSpec& w, double p, const std::vector<Ball>& balls) {
  if (balls.empty()) throw std::invalid_argument("doubling_check: empty ball family");
  DoublingCheck out;
  std::vector<Ball> family = balls;
  for (const Ball& b : balls) {
    Ball twice = b;
    twice.radius *= 2.0;
    family.push_back(twice);
    const double ratio = weighted_measure(w, twice) / weighted_measure(w, b);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  const ApEstimate est = estimate_ap_constant(w, p, family);
  out.ap_estimate = est.constant_estimate;
  out.bound = std::pow(2.0, w.dim * p) * est.constant_estimate;
  return out;
}

}  // namespace wplap
