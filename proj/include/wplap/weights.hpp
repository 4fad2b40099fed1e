#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wplap/mesh.hpp"
#include "wplap/quadrature.hpp"

namespace wplap {

/// Ball in R^N; in 1D the interval [center.x - radius, center.x + radius].
struct Ball {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  int dim = 2;

  double volume() const { return dim == 1 ? 2.0 * radius : M_PI * radius * radius; }
};

/// A weight function on R^N: constant, |x-x0|^alpha, or piecewise linear
/// nodal values on a mesh. Power weights record their singular point so
/// quadrature can avoid and grade toward it.
struct WeightSpec {
  enum class Kind { Constant, Power, Tabulated };
  Kind kind = Kind::Constant;
  int dim = 1;
  double value = 1.0;                              // Constant
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // Power singular point
  double alpha = 0.0;                              // Power exponent
  std::shared_ptr<const Mesh> mesh;                // Tabulated
  Eigen::VectorXd nodal;                           // Tabulated, all > 0

  static WeightSpec constant(double v, int dim = 1);
  static WeightSpec power(const Eigen::Vector2d& center, double alpha, int dim);
  static WeightSpec tabulated(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd nodal);

  bool is_constant_one() const { return kind == Kind::Constant && value == 1.0; }
  std::vector<Eigen::Vector2d> singular_points() const {
    if (kind == Kind::Power && alpha != 0.0) return {center};
    return {};
  }
};

double eval_weight(const WeightSpec& w, const Eigen::Vector2d& x);
/// w(x)^q with the power applied analytically for power weights.
double eval_weight_pow(const WeightSpec& w, double q, const Eigen::Vector2d& x);

/// Outcome of an adaptively refined integral: `converged` distinguishes a
/// finite value from numerically detected divergence.
struct RefinementResult {
  double value = 0.0;
  bool converged = false;
  int levels = 0;
  double last_increment = 0.0;
};

/// integral of w^q over the ball, with geometric-shell refinement toward the
/// weight's singular point; divergence is reported via converged=false.
RefinementResult integrate_ball_pow(const WeightSpec& w, double q, const Ball& ball,
                                    double rel_tol = 1e-8, int max_levels = 12);

double weighted_measure(const WeightSpec& w, const Ball& region);
double weighted_measure(const WeightSpec& w, const Mesh& region, const QuadratureRule& quad);

struct ApEstimate {
  double constant_estimate = 1.0;
  Ball worst_ball;
  int balls_tested = 0;
  bool in_ap = true;  // false when some ball integral diverged numerically
  std::vector<double> per_ball_ratio;
};

ApEstimate estimate_ap_constant(const WeightSpec& w, double p, const std::vector<Ball>& balls);

/// Deterministic family: log-spaced radii (d0/2^10 .. d0/2) crossed with
/// centers around the singular point.
std::vector<Ball> default_ball_family(const WeightSpec& w, double d0, int count);

/// |x|^alpha in A_p iff -N < alpha < N(p-1).
bool power_weight_ap_range(double alpha, int N, double p);

struct AsMembership {
  bool member = false;
  double integral = 0.0;
  bool s_valid = false;
  bool integral_converged = false;
  std::string note;
};

AsMembership check_as_membership(const WeightSpec& w, double s, double p, int N,
                                 const Domain& domain);

struct DoublingCheck {
  double max_ratio = 0.0;
  double bound = 0.0;
  double ap_estimate = 1.0;
};

DoublingCheck doubling_check(const WeightSpec& w, double p, const std::vector<Ball>& balls);

}  // namespace wplap
