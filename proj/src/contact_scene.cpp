#include "hrrt/contact_scene.hpp"

#include <algorithm>
#include <cmath>

namespace hrrt {

std::vector<double> default_corner_gammas() {
  const double q = M_PI / 4.0;
  return {q, 3.0 * q, 5.0 * q, 7.0 * q};
}

ContactScene::ContactScene(std::vector<SceneBody> bodies, std::vector<ContactPair> pairs, StiffnessProfile stiffness,
                           PoseFn pose_fn, int proxy_restarts)
    : bodies_(std::move(bodies)),
      pairs_(std::move(pairs)),
      stiffness_(stiffness),
      pose_fn_(std::move(pose_fn)),
      proxy_restarts_(proxy_restarts) {
  stiffness_.validate();
  pair_deps_.reserve(pairs_.size());
  for (const auto& pair : pairs_) {
    std::vector<int> deps = bodies_[pair.corner_body].state_deps;
    for (int d : bodies_[pair.surface_body].state_deps) deps.push_back(d);
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    pair_deps_.push_back(std::move(deps));
  }
}

int ContactScene::find_body(const std::string& role) const {
  for (size_t i = 0; i < bodies_.size(); ++i) {
    if (bodies_[i].role == role) return static_cast<int>(i);
  }
  return -1;
}

std::vector<ShapeSpec> parse_shapes(const json& shapes_array) {
  if (!shapes_array.is_array()) throw ConfigError("shapes must be an array");
  std::vector<ShapeSpec> specs;
  for (const json& s : shapes_array) {
    ShapeSpec spec;
    spec.role = s.at("role").get<std::string>();
    spec.shape = Superellipse(s.at("a1").get<double>(), s.at("a2").get<double>(), s.at("eps").get<double>());
    if (s.contains("pose")) {
      const VectorXd p = parse_vector(s.at("pose"), 3, "shapes[].pose");
      spec.shape.pose = {p[0], p[1], p[2]};
      spec.fixed_pose = true;
    }
    if (s.contains("corners")) {
      const VectorXd c = parse_vector(s.at("corners"), -1, "shapes[].corners");
      spec.corners.assign(c.data(), c.data() + c.size());
    } else {
      spec.corners = default_corner_gammas();
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

ShapeSpec& find_shape(std::vector<ShapeSpec>& specs, const std::string& role) {
  for (auto& s : specs) {
    if (s.role == role) return s;
  }
  throw ConfigError("shapes[] is missing required role '" + role + "'");
}

StiffnessProfile parse_stiffness(const json& config) {
  StiffnessProfile profile;
  if (config.contains("stiffness")) {
    const json& s = config.at("stiffness");
    profile = StiffnessProfile(s.value("k_min", 0.0), s.value("k_max", 1e4), s.value("d0", 0.01));
  }
  return profile;
}

std::vector<ContactPair> parse_contacts(const json& contacts_array, const std::vector<SceneBody>& bodies) {
  if (!contacts_array.is_array()) throw ConfigError("contacts must be an array");
  auto index_of = [&bodies](const std::string& role) {
    for (size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i].role == role) return static_cast<int>(i);
    }
    throw ConfigError("contacts[] references unknown body role '" + role + "'");
  };
  std::vector<ContactPair> pairs;
  for (const json& c : contacts_array) {
    pairs.push_back({index_of(c.at("corners_of").get<std::string>()), index_of(c.at("surface").get<std::string>())});
  }
  return pairs;
}

double ContactScene::pair_energy(int pair_index, const VectorXd& z, long* failure_counter) const {
  const ContactPair& pair = pairs_[pair_index];
  Superellipse corner_shape = bodies_[pair.corner_body].shape;
  Superellipse surface = bodies_[pair.surface_body].shape;
  corner_shape.pose = pose_fn_(pair.corner_body, z);
  surface.pose = pose_fn_(pair.surface_body, z);

  // Far-field cull: with k_min = 0 the stiffness (1 - tanh(d/d0))/2 * k_max is
  // exactly zero in double once the inside-outside gap exceeds ~25 d0, and
  // |c - center| > f * R guarantees that for any eps. Skipping those corners
  // changes nothing and avoids most proxy solves.
  double cull_r2 = -1.0;
  if (stiffness_.k_min == 0.0) {
    const double R = std::hypot(surface.a1, surface.a2);
    const double f = std::pow(1.0 + 25.0 * stiffness_.d0, surface.eps_shape / 2.0);
    cull_r2 = f * R * f * R;
  }
  const Vector2d surface_center{surface.pose.x, surface.pose.y};

  double energy = 0.0;
  for (double gamma : bodies_[pair.corner_body].corner_gammas) {
    const Vector2d c = corner_shape.boundary_point(gamma);
    if (cull_r2 > 0.0 && (c - surface_center).squaredNorm() > cull_r2) continue;
    try {
      const ProxyResult proxy = solve_proxy(surface, c, proxy_restarts_);
      const double k = contact_stiffness(stiffness_, proxy.gap);
      energy += 0.5 * k * proxy.distance * proxy.distance;
    } catch (const ProxyFailure&) {
      if (failure_counter) ++(*failure_counter);
    }
  }
  return energy;
}

double ContactScene::total_energy(const VectorXd& z, long* failure_counter) const {
  double energy = 0.0;
  for (size_t i = 0; i < pairs_.size(); ++i) {
    energy += pair_energy(static_cast<int>(i), z, failure_counter);
  }
  return energy;
}

}  // namespace hrrt
