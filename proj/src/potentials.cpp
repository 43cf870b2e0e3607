#include "hrrt/potentials.hpp"

#include <fstream>
#include <set>

#include "hrrt/contact_scene.hpp"
#include "hrrt/scenarios.hpp"

namespace hrrt {

void ScenarioModel::check_dims(const ConfigPoint& p) const {
  if (p.z.size() != state_dim_ || p.u.size() != control_dim_) {
    throw std::invalid_argument(name_ + ": point dimensions (" + std::to_string(p.z.size()) + "," +
                                std::to_string(p.u.size()) + ") do not match model (" + std::to_string(state_dim_) +
                                "," + std::to_string(control_dim_) + ")");
  }
}

DerivativeBundle ScenarioModel::fd_bundle(const ConfigPoint& point) const {
  const int n = state_dim_, k = control_dim_;
  VectorXd x(n + k);
  x.head(n) = point.z;
  x.tail(k) = point.u;
  auto f = [this, n, k](const VectorXd& v) { return energy(v.head(n), v.tail(k)); };
  VectorXd grad;
  MatrixXd hess = fd_hessian(f, x, fd_scheme_, &grad);

  DerivativeBundle b;
  b.W = energy(point.z, point.u);
  b.grad_z = grad.head(n);
  b.grad_u = grad.tail(k);
  b.H_zz = hess.topLeftCorner(n, n);
  b.H_uu = hess.bottomRightCorner(k, k);
  b.H_uz = hess.bottomLeftCorner(k, n);
  return b;
}

DerivativeBundle ScenarioModel::evaluate_bundle(const ConfigPoint& point) const {
  check_dims(point);
  return fd_bundle(point);
}

VectorXd ScenarioModel::state_gradient(const ConfigPoint& point) const { return evaluate_bundle(point).grad_z; }

VectorXd ScenarioModel::control_gradient(const ConfigPoint& point) const { return evaluate_bundle(point).grad_u; }

void ScenarioModel::parse_common(const json& config) {
  config_ = config;
  const json& bounds = config.at("control_bounds");
  control_lo_ = parse_vector(bounds.at("lo"), control_dim_, "control_bounds.lo");
  control_hi_ = parse_vector(bounds.at("hi"), control_dim_, "control_bounds.hi");
  if ((control_hi_.array() <= control_lo_.array()).any()) {
    throw ConfigError("control_bounds: hi must exceed lo elementwise");
  }
  const json& start = config.at("start");
  start_.z = parse_vector(start.at("z"), state_dim_, "start.z");
  start_.u = parse_vector(start.at("u"), control_dim_, "start.u");
  goal_ = parse_goal(config.contains("goal") ? config.at("goal") : json(), state_dim_, control_dim_);
}

VectorXd parse_vector(const json& arr, int expected_size, const std::string& key) {
  if (!arr.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  if (expected_size >= 0 && static_cast<int>(arr.size()) != expected_size) {
    throw ConfigError("config key '" + key + "' must have " + std::to_string(expected_size) + " entries, has " +
                      std::to_string(arr.size()));
  }
  VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError("config key '" + key + "' has a non-numeric entry");
    v[i] = arr[i].get<double>();
  }
  return v;
}

GoalSpec parse_goal(const json& goal, int state_dim, int control_dim) {
  GoalSpec spec;
  if (goal.is_null()) return spec;
  const std::string kind = goal.value("kind", "state-region");
  if (kind == "state-region") {
    spec.kind = GoalSpec::Kind::StateRegion;
  } else if (kind == "control-region") {
    spec.kind = GoalSpec::Kind::ControlRegion;
  } else {
    throw ConfigError("goal.kind must be 'state-region' or 'control-region', got '" + kind + "'");
  }
  const int dim = (spec.kind == GoalSpec::Kind::StateRegion) ? state_dim : control_dim;
  spec.center = parse_vector(goal.at("center"), dim, "goal.center");
  spec.radius = parse_vector(goal.at("radius"), dim, "goal.radius");
  if ((spec.radius.array() <= 0.0).any()) throw ConfigError("goal.radius entries must be positive");
  spec.present = true;
  return spec;
}

void accumulate_contact_fd(const ContactScene& scene, const VectorXd& z, const FdScheme& scheme,
                           long* failure_counter, double& W, VectorXd& grad_z, MatrixXd& H_zz) {
  for (size_t p = 0; p < scene.pairs().size(); ++p) {
    const std::vector<int>& deps = scene.pair_deps(static_cast<int>(p));
    const int pi = static_cast<int>(p);
    W += scene.pair_energy(pi, z, failure_counter);
    if (deps.empty()) continue;
    VectorXd sub(deps.size());
    for (size_t i = 0; i < deps.size(); ++i) sub[i] = z[deps[i]];
    VectorXd z_work = z;
    auto f = [&](const VectorXd& s) {
      for (size_t i = 0; i < deps.size(); ++i) z_work[deps[i]] = s[i];
      const double e = scene.pair_energy(pi, z_work, failure_counter);
      for (size_t i = 0; i < deps.size(); ++i) z_work[deps[i]] = z[deps[i]];
      return e;
    };
    VectorXd g;
    MatrixXd h = fd_hessian(f, sub, scheme, &g);
    for (size_t i = 0; i < deps.size(); ++i) {
      grad_z[deps[i]] += g[i];
      for (size_t j = 0; j < deps.size(); ++j) H_zz(deps[i], deps[j]) += h(i, j);
    }
  }
}

void accumulate_contact_grad(const ContactScene& scene, const VectorXd& z, const FdScheme& scheme,
                             long* failure_counter, VectorXd& grad_z) {
  VectorXd z_work = z;
  for (size_t p = 0; p < scene.pairs().size(); ++p) {
    const std::vector<int>& deps = scene.pair_deps(static_cast<int>(p));
    const int pi = static_cast<int>(p);
    for (int d : deps) {
      const double h = scheme.step_for(z[d]);
      z_work[d] = z[d] + h;
      const double fp = scene.pair_energy(pi, z_work, failure_counter);
      z_work[d] = z[d] - h;
      const double fm = scene.pair_energy(pi, z_work, failure_counter);
      z_work[d] = z[d];
      grad_z[d] += (fp - fm) / (2.0 * h);
    }
  }
}

namespace {

void check_keys(const json& config, const std::set<std::string>& allowed, const std::set<std::string>& required) {
  std::vector<std::string> bad;
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (!allowed.count(it.key())) bad.push_back(it.key());
  }
  std::vector<std::string> missing;
  for (const auto& key : required) {
    if (!config.contains(key)) missing.push_back(key);
  }
  if (!bad.empty() || !missing.empty()) {
    std::string msg = "config schema violation:";
    for (const auto& k : bad) msg += " unknown key '" + k + "';";
    for (const auto& k : missing) msg += " missing key '" + k + "';";
    throw ConfigError(msg);
  }
}

}  // namespace

std::unique_ptr<ScenarioModel> build_scenario(const json& config) {
  if (!config.is_object()) throw ConfigError("config root must be an object");
  check_keys(config,
             {"scenario", "params", "shapes", "contacts", "stiffness", "control_bounds", "start", "goal",
              "state_bounds", "planner"},
             {"scenario", "params", "control_bounds", "start"});
  const std::string name = config.at("scenario").get<std::string>();
  if (name == "pendulum") return make_pendulum(config);
  if (name == "clip") return make_clip(config);
  if (name == "bookshelf") return make_bookshelf(config);
  throw ConfigError("unknown scenario '" + name + "' (expected pendulum|clip|bookshelf)");
}

std::unique_ptr<ScenarioModel> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return build_scenario(config);
}

}  // namespace hrrt
