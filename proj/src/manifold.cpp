#include "hrrt/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace hrrt {

namespace {

EquilibriumPoint classify(const ScenarioModel& model, const DerivativeBundle& bundle, const ConfigPoint& point) {
  EquilibriumPoint eq;
  eq.point = point;
  eq.residual_norm = bundle.grad_z.norm();
  eq.hess_det = hessian_determinant(bundle.H_zz);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (bundle.H_zz + bundle.H_zz.transpose()));
  eq.stable = es.eigenvalues().minCoeff() > 0.0;
  eq.W = bundle.W;
  return eq;
}

}  // namespace

std::optional<EquilibriumPoint> solve_equilibrium(const ScenarioModel& model, const VectorXd& u,
                                                  const VectorXd& z_seed, const EquilibriumSettings& settings) {
  const double tol = settings.residual_tol_rel * model.force_scale();
  VectorXd z = z_seed;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    ConfigPoint point{z, u};
    DerivativeBundle bundle = model.evaluate_bundle(point);
    const double res = bundle.grad_z.norm();
    if (!std::isfinite(res)) return std::nullopt;
    if (res <= tol) return classify(model, bundle, point);

    Eigen::FullPivLU<MatrixXd> lu(bundle.H_zz);
    if (!lu.isInvertible()) return std::nullopt;
    const VectorXd step = lu.solve(bundle.grad_z);

    // Backtracking on the residual norm, halving the step up to 4 times.
    double alpha = 1.0;
    bool improved = false;
    for (int halve = 0; halve <= 4; ++halve) {
      const VectorXd z_try = z - alpha * step;
      const double res_try = model.state_gradient({z_try, u}).norm();
      if (std::isfinite(res_try) && res_try < res) {
        z = z_try;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) return std::nullopt;
  }

  // Final iterate may have just crossed the tolerance.
  ConfigPoint point{z, u};
  DerivativeBundle bundle = model.evaluate_bundle(point);
  if (bundle.grad_z.norm() <= tol) return classify(model, bundle, point);
  return std::nullopt;
}

BranchSet enumerate_branches(const ScenarioModel& model, const VectorXd& u, const std::vector<VectorXd>& seeds,
                             const EquilibriumSettings& settings, double dedup_radius) {
  BranchSet set;
  set.control = u;
  const VectorXd& scale = model.state_scale();
  for (const VectorXd& seed : seeds) {
    ++set.seeds_used;
    auto eq = solve_equilibrium(model, u, seed, settings);
    if (!eq || !eq->stable) continue;
    eq->point.z = model.canonical_state(eq->point.z);
    bool merged = false;
    for (EquilibriumPoint& existing : set.equilibria) {
      const VectorXd diff = (eq->point.z - existing.point.z).cwiseQuotient(scale);
      if (diff.norm() <= dedup_radius) {
        if (eq->W < existing.W) existing = *eq;
        merged = true;
        break;
      }
    }
    if (!merged) set.equilibria.push_back(*eq);
  }
  std::sort(set.equilibria.begin(), set.equilibria.end(),
            [](const EquilibriumPoint& a, const EquilibriumPoint& b) { return a.W < b.W; });
  return set;
}

HapticMetric haptic_metric_at(const ScenarioModel& model, const DerivativeBundle& bundle) {
  (void)model;
  const MatrixXd H_sym = 0.5 * (bundle.H_zz + bundle.H_zz.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H_sym);
  const double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
  const double min_abs = es.eigenvalues().cwiseAbs().minCoeff();
  if (!(min_abs > 0.0) || max_abs / min_abs > 1e12) {
    throw NearSingularMetricError("state Hessian is numerically singular (|eig| ratio " +
                                  std::to_string(min_abs > 0.0 ? max_abs / min_abs : 0.0) + ")");
  }
  HapticMetric metric;
  const MatrixXd X = es.eigenvectors() *
                     es.eigenvalues().cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose() * bundle.H_uz.transpose();
  metric.G = bundle.H_uu - bundle.H_uz * X;
  metric.G_squared = metric.G * metric.G;
  return metric;
}

HapticMetric haptic_metric(const ScenarioModel& model, const EquilibriumPoint& eq) {
  return haptic_metric_at(model, model.evaluate_bundle(eq.point));
}

double hessian_determinant(const MatrixXd& H_zz) { return H_zz.determinant(); }

bool is_haptic_obstacle(const ScenarioModel& model, const ConfigPoint& point, double lambda) {
  return hessian_determinant(model.evaluate_bundle(point).H_zz) <= lambda;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::DistanceReached: return "distance-reached";
    case StopReason::Obstacle: return "obstacle";
    case StopReason::ControlBounds: return "control-bounds";
    case StopReason::TargetReached: return "target-reached";
  }
  return "unknown";
}

namespace {

struct TrackRhs {
  const ScenarioModel& model;
  const VectorXd u_dot;  // constant unit direction
  const double eta;
  const int n, k;

  // State layout: [z (n), u (k), phi (1)].
  VectorXd operator()(const VectorXd& s, const DerivativeBundle* bundle_hint) const {
    ConfigPoint p{s.head(n), s.segment(n, k)};
    DerivativeBundle local;
    const DerivativeBundle& b = bundle_hint ? *bundle_hint : (local = model.evaluate_bundle(p), local);

    Eigen::FullPivLU<MatrixXd> lu(b.H_zz);
    if (!lu.isInvertible()) {
      throw IntegrationError("state Hessian became singular while tracking", s);
    }
    const VectorXd z_dot = -lu.solve(b.H_uz.transpose() * u_dot + eta * b.grad_z);

    const MatrixXd G = b.H_uu - b.H_uz * lu.solve(b.H_uz.transpose());
    const double phi_dot = (G * u_dot).norm();

    VectorXd ds(n + k + 1);
    ds.head(n) = z_dot;
    ds.segment(n, k) = u_dot;
    ds[n + k] = phi_dot;
    return ds;
  }
};

}  // namespace

TrackTrace track(const ScenarioModel& model, const EquilibriumPoint& start, const VectorXd& u_target, double epsilon,
                 const TrackSettings& settings) {
  const int n = model.state_dim();
  const int k = model.control_dim();

  TrackTrace trace;
  const VectorXd du = u_target - start.point.u;
  const double total_dist = du.norm();
  if (total_dist < 1e-12) {
    trace.samples.push_back({0.0, start.point.z, start.point.u, 0.0});
    trace.stop_reason = StopReason::TargetReached;
    trace.final = start;
    return trace;
  }
  const VectorXd u_dot = du / total_dist;
  TrackRhs rhs{model, u_dot, settings.eta, n, k};

  VectorXd s(n + k + 1);
  s.head(n) = start.point.z;
  s.segment(n, k) = start.point.u;
  s[n + k] = 0.0;
  double t = 0.0;
  trace.samples.push_back({t, start.point.z, start.point.u, 0.0});

  auto finalize = [&](StopReason reason, const DerivativeBundle* bundle) {
    trace.stop_reason = reason;
    ConfigPoint p{s.head(n), s.segment(n, k)};
    if (reason != StopReason::Obstacle) {
      // Polish the endpoint back onto the manifold.
      if (auto eq = solve_equilibrium(model, p.u, p.z)) {
        trace.final = *eq;
        s.head(n) = eq->point.z;
        trace.samples.back().z = eq->point.z;
        return;
      }
      trace.diagnostics += "endpoint polish failed to converge; ";
    }
    DerivativeBundle local;
    const DerivativeBundle& b = bundle ? *bundle : (local = model.evaluate_bundle(p), local);
    trace.final = classify(model, b, p);
  };

  for (int step = 0; step < settings.max_steps; ++step) {
    ConfigPoint p{s.head(n), s.segment(n, k)};
    DerivativeBundle bundle = model.evaluate_bundle(p);

    if (s[n + k] >= epsilon) {
      finalize(StopReason::DistanceReached, &bundle);
      return trace;
    }
    if (hessian_determinant(bundle.H_zz) <= settings.lambda) {
      finalize(StopReason::Obstacle, &bundle);
      return trace;
    }
    const double remaining = (u_target - p.u).norm();
    if (remaining <= settings.dt) {
      // Integrate the final partial step so phi covers the whole segment, then
      // land u exactly on the target.
      try {
        VectorXd k1 = rhs(s, &bundle);
        VectorXd k2 = rhs(s + 0.5 * remaining * k1, nullptr);
        VectorXd k3 = rhs(s + 0.5 * remaining * k2, nullptr);
        VectorXd k4 = rhs(s + remaining * k3, nullptr);
        const VectorXd ds = (remaining / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (ds.allFinite() && ds.head(n).cwiseAbs().maxCoeff() <= settings.max_step_jump) s += ds;
      } catch (const IntegrationError& e) {
        trace.diagnostics += std::string(e.what()) + " on the final partial step; ";
      }
      s.segment(n, k) = u_target;
      trace.samples.push_back({t + remaining, s.head(n), u_target, s[n + k]});
      finalize(StopReason::TargetReached, nullptr);
      return trace;
    }
    if (!model.in_control_bounds(p.u)) {
      finalize(StopReason::ControlBounds, &bundle);
      return trace;
    }

    // Classical RK4 step, reusing the check bundle for the first stage.
    const double dt = settings.dt;
    VectorXd k1, k2, k3, k4;
    try {
      k1 = rhs(s, &bundle);
      k2 = rhs(s + 0.5 * dt * k1, nullptr);
      k3 = rhs(s + 0.5 * dt * k2, nullptr);
      k4 = rhs(s + dt * k3, nullptr);
    } catch (const IntegrationError& e) {
      trace.diagnostics += std::string(e.what()) + "; ";
      finalize(StopReason::Obstacle, &bundle);
      return trace;
    }
    const VectorXd ds = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!ds.allFinite() || ds.head(n).cwiseAbs().maxCoeff() > settings.max_step_jump) {
      trace.diagnostics += "state jump exceeded the per-step limit; ";
      finalize(StopReason::Obstacle, &bundle);
      return trace;
    }
    s += ds;
    t += dt;
    trace.samples.push_back({t, s.head(n), s.segment(n, k), s[n + k]});
  }

  trace.diagnostics += "step cap reached before any stop condition; ";
  finalize(StopReason::DistanceReached, nullptr);
  return trace;
}

double haptic_distance(const TrackTrace& trace) {
  return trace.samples.empty() ? 0.0 : trace.samples.back().phi;
}

}  // namespace hrrt
