#pragma once

#include <optional>

#include "hrrt/potentials.hpp"

namespace hrrt {

struct EquilibriumPoint {
  ConfigPoint point;
  double residual_norm = 0.0;
  double hess_det = 0.0;
  bool stable = false;
  double W = 0.0;
};

struct EquilibriumSettings {
  double residual_tol_rel = 1e-8;  // scaled by the model's force scale
  int max_iters = 60;
};

/// Newton-refines z at fixed u onto the equilibrium manifold. Non-convergence
/// is data (nullopt), not an error.
std::optional<EquilibriumPoint> solve_equilibrium(const ScenarioModel& model, const VectorXd& u,
                                                  const VectorXd& z_seed, const EquilibriumSettings& settings = {});

struct BranchSet {
  VectorXd control;
  std::vector<EquilibriumPoint> equilibria;  // stable, distinct, sorted by W
  int seeds_used = 0;
};

/// Multiplicity of equilibria at one control: solve from every seed, keep
/// converged stable points, deduplicate, sort by W ascending.
BranchSet enumerate_branches(const ScenarioModel& model, const VectorXd& u, const std::vector<VectorXd>& seeds,
                             const EquilibriumSettings& settings = {}, double dedup_radius = 1e-4);

struct NearSingularMetricError : std::runtime_error {
  explicit NearSingularMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

struct HapticMetric {
  MatrixXd G;          // reduced Hessian (Schur complement), K x K
  MatrixXd G_squared;  // metric tensor G*G
};

HapticMetric haptic_metric(const ScenarioModel& model, const EquilibriumPoint& eq);
HapticMetric haptic_metric_at(const ScenarioModel& model, const DerivativeBundle& bundle);

/// Haptic obstacle test: det(H_zz) <= lambda marks impending loss of
/// stability; the valid region is det > lambda.
bool is_haptic_obstacle(const ScenarioModel& model, const ConfigPoint& point, double lambda);

double hessian_determinant(const MatrixXd& H_zz);

enum class StopReason { DistanceReached, Obstacle, ControlBounds, TargetReached };
const char* to_string(StopReason reason);

struct TrackSample {
  double t;
  VectorXd z;
  VectorXd u;
  double phi;
};

struct TrackSettings {
  double eta = 10.0;
  double dt = 1e-3;
  double lambda = 1e-3;
  int max_steps = 2000000;
  /// Largest allowed |dz|_inf in one integration step. A blow-up past this is
  /// the integrator skipping across a singularity, reported as an obstacle.
  double max_step_jump = 0.05;
};

struct TrackTrace {
  std::vector<TrackSample> samples;
  StopReason stop_reason = StopReason::TargetReached;
  EquilibriumPoint final;
  std::string diagnostics;
};

/// Moves a point along the equilibrium manifold as u drives at unit speed
/// toward u_target, accumulating haptic distance phi; stops at the first of:
/// phi budget, haptic obstacle, target reached, or control bounds.
TrackTrace track(const ScenarioModel& model, const EquilibriumPoint& start, const VectorXd& u_target, double epsilon,
                 const TrackSettings& settings);

/// Accumulated haptic distance of a trace (its final phi).
double haptic_distance(const TrackTrace& trace);

}  // namespace hrrt
