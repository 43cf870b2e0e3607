#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hrrt {

using Eigen::Vector2d;

/// Planar rigid pose (translation + rotation).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vector2d to_world(const Vector2d& body) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {x + c * body.x() - s * body.y(), y + s * body.x() + c * body.y()};
  }
  Vector2d to_body(const Vector2d& world) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double dx = world.x() - x, dy = world.y() - y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
};

/// 2D superellipse (x/a1)^(2/eps) + (y/a2)^(2/eps) = 1 in its body frame.
struct Superellipse {
  double a1 = 1.0;
  double a2 = 1.0;
  double eps_shape = 1.0;
  Pose2 pose;

  Superellipse() = default;
  Superellipse(double a1_, double a2_, double eps_, Pose2 pose_ = {}) : a1(a1_), a2(a2_), eps_shape(eps_), pose(pose_) {
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(eps_shape > 0.0)) {
      throw std::invalid_argument("Superellipse: a1, a2, eps must be positive");
    }
  }

  /// Boundary point at surface parameter gamma in [0, 2pi), world frame.
  Vector2d boundary_point(double gamma) const;
  /// Same, in the body frame.
  Vector2d boundary_point_body(double gamma) const;
};

/// Inside-outside value of a world point: >0 outside, <0 inside, 0 on the
/// surface. Axis points are handled by taking |.| before the fractional
/// exponent.
double inside_outside(const Superellipse& shape, const Vector2d& point);

/// Nonlinear contact stiffness profile k(d) = k_min + (1 - tanh(d/d0))/2 * k_max.
struct StiffnessProfile {
  double k_min = 0.0;
  double k_max = 1e4;
  double d0 = 0.01;

  StiffnessProfile() = default;
  StiffnessProfile(double kmin, double kmax, double d0_) : k_min(kmin), k_max(kmax), d0(d0_) { validate(); }
  void validate() const {
    if (!(d0 > 0.0)) throw std::invalid_argument("StiffnessProfile: d0 must be positive");
    if (k_min < 0.0 || k_max <= 0.0) throw std::invalid_argument("StiffnessProfile: stiffness must be non-negative");
    if (k_min > 0.0 && k_max < 100.0 * k_min) {
      throw std::invalid_argument("StiffnessProfile: expected k_max >= 100 * k_min");
    }
  }
};

double contact_stiffness(const StiffnessProfile& profile, double d);

struct ProxyFailure : std::runtime_error {
  explicit ProxyFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProxyResult {
  double gamma = 0.0;        // surface parameter in [0, 2pi)
  Vector2d proxy_point;      // p(gamma), world frame
  Vector2d query_point;      // c, world frame
  double gap = 0.0;          // inside-outside value at the query point
  double distance = 0.0;     // |c - p|
};

/// Closest surface point on the superellipse to a world query point.
/// Multi-start over `restarts` equispaced seeds, Brent refinement of the best
/// bracket; ties broken by smallest gamma.
ProxyResult solve_proxy(const Superellipse& shape, const Vector2d& query, int restarts = 8);

}  // namespace hrrt
