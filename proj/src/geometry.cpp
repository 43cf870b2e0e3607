#include "hrrt/geometry.hpp"

#include <cmath>
#include <limits>

namespace hrrt {

namespace {

double signed_pow(double v, double e) { return std::copysign(std::pow(std::abs(v), e), v); }

constexpr double kTwoPi = 6.283185307179586476925287;

/// Brent 1D minimization on [a, b]. Returns the argmin; fmin_out receives the
/// minimum value.
double brent_minimize(const std::function<double(double)>& f, double a, double b, double tol, int max_iters,
                      double* fmin_out) {
  const double golden = 0.3819660112501051;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-12;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  if (fmin_out) *fmin_out = fx;
  return x;
}

}  // namespace

Vector2d Superellipse::boundary_point_body(double gamma) const {
  const double c = std::cos(gamma), s = std::sin(gamma);
  return {a1 * signed_pow(c, eps_shape), a2 * signed_pow(s, eps_shape)};
}

Vector2d Superellipse::boundary_point(double gamma) const { return pose.to_world(boundary_point_body(gamma)); }

double inside_outside(const Superellipse& shape, const Vector2d& point) {
  if (!point.allFinite()) throw std::invalid_argument("inside_outside: non-finite query point");
  const Vector2d b = shape.pose.to_body(point);
  const double e = 2.0 / shape.eps_shape;
  return std::pow(std::abs(b.x() / shape.a1), e) + std::pow(std::abs(b.y() / shape.a2), e) - 1.0;
}

double contact_stiffness(const StiffnessProfile& profile, double d) {
  return profile.k_min + 0.5 * (1.0 - std::tanh(d / profile.d0)) * profile.k_max;
}

ProxyResult solve_proxy(const Superellipse& shape, const Vector2d& query, int restarts) {
  if (restarts < 4) throw std::invalid_argument("solve_proxy: restarts must be >= 4");
  if (!query.allFinite()) throw ProxyFailure("solve_proxy: non-finite query point");

  // Work in the body frame; gamma is frame-independent.
  const Vector2d q = shape.pose.to_body(query);
  auto dist2 = [&](double gamma) {
    const Vector2d p = shape.boundary_point_body(gamma);
    return (p - q).squaredNorm();
  };

  double best_gamma = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  const double seed_step = kTwoPi / restarts;
  for (int i = 0; i < restarts; ++i) {
    const double g = i * seed_step;
    const double v = dist2(g);
    if (v < best_val) {
      best_val = v;
      best_gamma = g;
    }
  }
  if (!std::isfinite(best_val)) throw ProxyFailure("solve_proxy: objective non-finite at all restarts");

  double fref = best_val;
  const double refined = brent_minimize(dist2, best_gamma - seed_step, best_gamma + seed_step, 1e-12, 60, &fref);
  // Keep the seed unless refinement genuinely improves on it; on a flat
  // objective (query at the center) rounding noise must not move gamma off
  // the smallest tied seed.
  double gamma = (fref < best_val - 1e-12 * (1.0 + best_val)) ? refined : best_gamma;
  gamma = std::fmod(gamma, kTwoPi);
  if (gamma < 0.0) gamma += kTwoPi;

  ProxyResult result;
  result.gamma = gamma;
  result.proxy_point = shape.boundary_point(gamma);
  result.query_point = query;
  result.gap = inside_outside(shape, query);
  result.distance = (result.proxy_point - query).norm();
  return result;
}

}  // namespace hrrt
