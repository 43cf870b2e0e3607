#include "hrrt/planner.hpp"

#include <algorithm>
#include <cmath>

namespace hrrt {

namespace {

double sigma_norm(const MatrixXd& sigma, const VectorXd& d) {
  if (sigma.size() == 0) return d.norm();
  return std::sqrt(d.dot(sigma * d));
}

int nearest_node(const Tree& tree, const MatrixXd& sigma, double beta, const VectorXd& u_rand) {
  double w_min = std::numeric_limits<double>::infinity();
  for (const TreeNode& node : tree.nodes) {
    if (!node.dead_end) w_min = std::min(w_min, node.eq.W);
  }
  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (const TreeNode& node : tree.nodes) {
    if (node.dead_end) continue;
    const double w = std::max(node.eq.W - w_min, kPotentialFloor);
    const double score = std::pow(w, beta) * sigma_norm(sigma, node.eq.point.u - u_rand);
    if (score < best_score) {
      best_score = score;
      best = node.id;
    }
  }
  return best;
}

}  // namespace

SampleResult sample_direction(const Tree& tree, const ScenarioModel& model, const PlannerParams& params,
                              std::mt19937_64& rng) {
  const VectorXd& lo = model.control_lo();
  const VectorXd& hi = model.control_hi();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 0; attempt < 128; ++attempt) {
    VectorXd u_rand(lo.size());
    for (int i = 0; i < lo.size(); ++i) u_rand[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);

    const int near = nearest_node(tree, params.sigma, params.beta, u_rand);
    if (near < 0) throw PlannerExhaustedError("all tree nodes are dead ends");
    const VectorXd d = u_rand - tree.nodes[near].eq.point.u;
    const double len = d.norm();
    if (len <= 1e-9) continue;  // degenerate direction, redraw
    return {u_rand, d / len, near};
  }
  throw PlannerExhaustedError("could not draw a usable control sample");
}

const TreeNode& extend(Tree& tree, const ScenarioModel& model, int near_id, const VectorXd& u_rand,
                       const PlannerParams& params) {
  const TreeNode& near = tree.nodes[near_id];

  TreeNode node;
  node.id = static_cast<int>(tree.nodes.size());
  node.parent = near_id;
  try {
    TrackTrace trace = track(model, near.eq, u_rand, params.epsilon, params.track_settings());
    node.eq = trace.final;
    node.dead_end = (trace.stop_reason == StopReason::Obstacle);
    node.edge_phi = haptic_distance(trace);
    node.diagnostics = trace.diagnostics;
    node.trace_index = static_cast<int>(tree.traces.size());
    tree.traces.push_back(std::move(trace));
  } catch (const IntegrationError& e) {
    node.eq = near.eq;
    node.dead_end = true;
    node.diagnostics = e.what();
  }
  node.cumulative_phi = near.cumulative_phi + node.edge_phi;
  tree.nodes.push_back(std::move(node));
  return tree.nodes.back();
}

PlanResult plan(const ScenarioModel& model, const ConfigPoint& start, const PlannerParams& params) {
  auto eq = solve_equilibrium(model, start.u, start.z);
  if (!eq) throw StartInvalidError("start point does not refine to an equilibrium");
  if (!eq->stable) throw StartInvalidError("start equilibrium is unstable");
  if (eq->hess_det <= params.lambda) throw StartInvalidError("start equilibrium lies in the haptic obstacle region");
  if (!model.in_control_bounds(eq->point.u)) throw StartInvalidError("start control is out of bounds");

  PlanResult result;
  TreeNode root;
  root.id = 0;
  root.eq = *eq;
  result.tree.nodes.push_back(std::move(root));

  const GoalSpec& goal = params.goal;
  if (goal.contains(eq->point.z, eq->point.u)) {
    result.goal_node = 0;
    return result;
  }

  std::mt19937_64 rng(params.rng_seed);
  for (int n = 1; n <= params.max_nodes; ++n) {
    SampleResult sample;
    try {
      sample = sample_direction(result.tree, model, params, rng);
    } catch (const PlannerExhaustedError&) {
      break;
    }
    const TreeNode& node = extend(result.tree, model, sample.near_id, sample.u_rand, params);
    result.iterations = n;
    if (!node.dead_end && goal.contains(node.eq.point.z, node.eq.point.u)) {
      result.goal_node = node.id;
      break;
    }
  }
  return result;
}

Path extract_path(const Tree& tree, int node_id) {
  if (node_id < 0 || node_id >= static_cast<int>(tree.nodes.size())) {
    throw std::runtime_error("extract_path: node id out of range");
  }
  Path path;
  int id = node_id;
  int guard = 0;
  while (id >= 0) {
    if (++guard > static_cast<int>(tree.nodes.size())) {
      throw std::runtime_error("extract_path: parent chain does not terminate at the root");
    }
    const TreeNode& node = tree.nodes[id];
    path.steps.push_back({node.id, node.trace_index});
    path.total_phi += node.edge_phi;
    id = node.parent;
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

}  // namespace hrrt
