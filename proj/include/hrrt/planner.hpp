#pragma once

#include <optional>
#include <random>

#include "hrrt/manifold.hpp"

namespace hrrt {

struct PlannerParams {
  double epsilon = 0.5;  // haptic-distance budget per extension
  double lambda = 1e-3;  // obstacle threshold on det(H_zz)
  double beta = 1.0;     // potential-bias exponent of the nearest score
  MatrixXd sigma;        // K x K SPD weight of the control distance; identity when empty
  int max_nodes = 2000;
  std::uint64_t rng_seed = 0;
  GoalSpec goal;
  double eta = 10.0;
  double dt = 1e-3;

  TrackSettings track_settings() const {
    TrackSettings t;
    t.eta = eta;
    t.dt = dt;
    t.lambda = lambda;
    return t;
  }
};

struct TreeNode {
  int id = 0;
  int parent = -1;  // -1 for the root
  EquilibriumPoint eq;
  bool dead_end = false;
  double edge_phi = 0.0;
  double cumulative_phi = 0.0;
  int trace_index = -1;  // into Tree::traces, -1 for the root
  std::string diagnostics;
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<TrackTrace> traces;
};

struct StartInvalidError : std::runtime_error {
  explicit StartInvalidError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PlannerExhaustedError : std::runtime_error {
  explicit PlannerExhaustedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SampleResult {
  VectorXd u_rand;
  VectorXd u_dot;  // unit direction from the selected node toward u_rand
  int near_id = -1;
};

/// Floor applied to the potential offset before the beta exponentiation.
inline constexpr double kPotentialFloor = 1e-6;

/// Draws u_rand uniformly within control bounds and selects the non-dead-end
/// node minimizing max(W - W_min_tree, floor)^beta * |u - u_rand|_Sigma, ties
/// by lowest id. Samples landing within 1e-9 of the selected node's control
/// are redrawn.
SampleResult sample_direction(const Tree& tree, const ScenarioModel& model, const PlannerParams& params,
                              std::mt19937_64& rng);

/// Extends the tree from `near` toward u_rand with haptic budget epsilon.
/// The stop state becomes a new node; an obstacle stop marks it dead-end.
const TreeNode& extend(Tree& tree, const ScenarioModel& model, int near_id, const VectorXd& u_rand,
                       const PlannerParams& params);

struct PlanResult {
  Tree tree;
  std::optional<int> goal_node;
  int iterations = 0;
};

/// HapticRRT: grows the tree for up to max_nodes extensions, checking the goal
/// after each insertion. Deterministic for a fixed seed.
PlanResult plan(const ScenarioModel& model, const ConfigPoint& start, const PlannerParams& params);

struct PathStep {
  int node_id;
  int trace_index;  // -1 for the root entry
};

struct Path {
  std::vector<PathStep> steps;  // root first
  double total_phi = 0.0;
};

/// Root-to-node chain. Throws std::runtime_error on a detached node.
Path extract_path(const Tree& tree, int node_id);

}  // namespace hrrt
