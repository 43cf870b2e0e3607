#include <cmath>

#include "hrrt/scenarios.hpp"

namespace hrrt {

ClipModel::ClipModel(const ClipParams& params, const json& config) : params_(params) {
  if ((params_.K_c.array() <= 0.0).any() || !(params_.k_theta > 0.0)) {
    throw ConfigError("clip: K_c must be positive definite and k_theta > 0");
  }
  name_ = "clip";
  state_dim_ = 3;
  control_dim_ = 2;
  state_names_ = {"z_theta", "z_ly", "z_rx"};
  control_names_ = {"u_ly", "u_rx"};
  parse_common(config);
  z_r_ref_ = start_.z.tail(2);

  std::vector<ShapeSpec> specs = parse_shapes(config.at("shapes"));
  auto body = [&](const std::string& role, std::vector<int> deps) {
    ShapeSpec& s = find_shape(specs, role);
    return SceneBody{role, s.shape, s.corners, std::move(deps)};
  };
  std::vector<SceneBody> bodies{body("arm", {0}), body("object", {2}), body("ee", {1}), body("anvil", {})};

  std::vector<ContactPair> pairs;
  if (config.contains("contacts")) {
    pairs = parse_contacts(config.at("contacts"), bodies);
  } else {
    pairs = {{2, 0}, {1, 0}, {0, 1}, {0, 3}};  // ee->arm, object->arm, arm->object, arm->anvil
  }
  scene_ = std::make_unique<ContactScene>(std::move(bodies), std::move(pairs), parse_stiffness(config),
                                          [this](int b, const VectorXd& z) { return body_pose(b, z); });

  if (config.contains("state_bounds")) {
    const json& sb = config.at("state_bounds");
    seed_lo_ = parse_vector(sb.at("lo"), 3, "state_bounds.lo");
    seed_hi_ = parse_vector(sb.at("hi"), 3, "state_bounds.hi");
  } else {
    seed_lo_ = VectorXd(3);
    seed_hi_ = VectorXd(3);
    seed_lo_ << params_.z_theta0 - 0.2, control_lo_[0], control_lo_[1];
    seed_hi_ << params_.z_theta0 + 0.7, control_hi_[0], control_hi_[1];
  }

  force_scale_ = params_.K_c.maxCoeff() * 0.1;
  state_scale_ = VectorXd::Ones(3);
}

Pose2 ClipModel::body_pose(int body, const VectorXd& z) const {
  switch (body) {
    case 0: return {params_.hinge.x(), params_.hinge.y(), z[0]};        // arm
    case 1: return {z[2], params_.object_y, 0.0};                       // object
    case 2: return {params_.ee_x, z[1], 0.0};                           // ee
    default: return scene_->bodies()[body].shape.pose;                  // fixed
  }
}

double ClipModel::energy(const VectorXd& z, const VectorXd& u) const {
  const Vector2d z_r(z[1], z[2]);
  const Vector2d du(u[0] - z_r.x(), u[1] - z_r.y());
  double W = 0.5 * (params_.K_c.x() * du.x() * du.x() + params_.K_c.y() * du.y() * du.y());
  const double dtheta = z[0] - params_.z_theta0;
  W += 0.5 * params_.k_theta * dtheta * dtheta;
  if (params_.k_reg > 0.0) {
    W += 0.5 * params_.k_reg * (z_r - Vector2d(z_r_ref_[0], z_r_ref_[1])).squaredNorm();
  }
  W += scene_->total_energy(z, &contact_failures_);
  return W;
}

DerivativeBundle ClipModel::evaluate_bundle(const ConfigPoint& point) const {
  check_dims(point);
  const VectorXd& z = point.z;
  const VectorXd& u = point.u;

  DerivativeBundle b;
  b.grad_z = VectorXd::Zero(3);
  b.grad_u = VectorXd::Zero(2);
  b.H_zz = MatrixXd::Zero(3, 3);
  b.H_uz = MatrixXd::Zero(2, 3);
  b.H_uu = MatrixXd::Zero(2, 2);

  const Vector2d du(u[0] - z[1], u[1] - z[2]);
  const Vector2d f_spring(params_.K_c.x() * du.x(), params_.K_c.y() * du.y());
  const double dtheta = z[0] - params_.z_theta0;

  b.W = 0.5 * (f_spring.x() * du.x() + f_spring.y() * du.y()) + 0.5 * params_.k_theta * dtheta * dtheta;
  b.grad_z[0] = params_.k_theta * dtheta;
  b.grad_z[1] = -f_spring.x();
  b.grad_z[2] = -f_spring.y();
  b.grad_u[0] = f_spring.x();
  b.grad_u[1] = f_spring.y();
  b.H_zz(0, 0) = params_.k_theta;
  b.H_zz(1, 1) = params_.K_c.x();
  b.H_zz(2, 2) = params_.K_c.y();
  b.H_uu(0, 0) = params_.K_c.x();
  b.H_uu(1, 1) = params_.K_c.y();
  b.H_uz(0, 1) = -params_.K_c.x();
  b.H_uz(1, 2) = -params_.K_c.y();

  if (params_.k_reg > 0.0) {
    const Vector2d dr(z[1] - z_r_ref_[0], z[2] - z_r_ref_[1]);
    b.W += 0.5 * params_.k_reg * dr.squaredNorm();
    b.grad_z[1] += params_.k_reg * dr.x();
    b.grad_z[2] += params_.k_reg * dr.y();
    b.H_zz(1, 1) += params_.k_reg;
    b.H_zz(2, 2) += params_.k_reg;
  }

  accumulate_contact_fd(*scene_, z, fd_scheme_, &contact_failures_, b.W, b.grad_z, b.H_zz);
  return b;
}

VectorXd ClipModel::state_gradient(const ConfigPoint& point) const {
  check_dims(point);
  const VectorXd& z = point.z;
  const VectorXd& u = point.u;
  VectorXd g(3);
  g[0] = params_.k_theta * (z[0] - params_.z_theta0);
  g[1] = -params_.K_c.x() * (u[0] - z[1]);
  g[2] = -params_.K_c.y() * (u[1] - z[2]);
  if (params_.k_reg > 0.0) {
    g[1] += params_.k_reg * (z[1] - z_r_ref_[0]);
    g[2] += params_.k_reg * (z[2] - z_r_ref_[1]);
  }
  accumulate_contact_grad(*scene_, z, fd_scheme_, &contact_failures_, g);
  return g;
}

VectorXd ClipModel::control_gradient(const ConfigPoint& point) const {
  check_dims(point);
  VectorXd g(2);
  g[0] = params_.K_c.x() * (point.u[0] - point.z[1]);
  g[1] = params_.K_c.y() * (point.u[1] - point.z[2]);
  return g;
}

std::vector<VectorXd> ClipModel::default_seed_grid(const VectorXd& u) const {
  std::vector<VectorXd> seeds;
  VectorXd seed(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int l = 0; l < 3; ++l) {
        seed[0] = seed_lo_[0] + i * 0.5 * (seed_hi_[0] - seed_lo_[0]);
        seed[1] = seed_lo_[1] + j * 0.5 * (seed_hi_[1] - seed_lo_[1]);
        seed[2] = seed_lo_[2] + l * 0.5 * (seed_hi_[2] - seed_lo_[2]);
        seeds.push_back(seed);
      }
    }
  }
  seed << params_.z_theta0, u[0], u[1];
  seeds.push_back(seed);
  return seeds;
}

std::unique_ptr<ScenarioModel> make_clip(const json& config) {
  const json& p = config.at("params");
  ClipParams params;
  if (p.contains("K_c")) {
    const VectorXd kc = parse_vector(p.at("K_c"), 2, "params.K_c");
    params.K_c = {kc[0], kc[1]};
  }
  params.k_theta = p.value("k_theta", params.k_theta);
  params.z_theta0 = p.value("z_theta0", params.z_theta0);
  if (p.contains("hinge")) {
    const VectorXd h = parse_vector(p.at("hinge"), 2, "params.hinge");
    params.hinge = {h[0], h[1]};
  }
  params.ee_x = p.value("ee_x", params.ee_x);
  params.object_y = p.value("object_y", params.object_y);
  params.k_reg = p.value("k_reg", params.k_reg);
  return std::make_unique<ClipModel>(params, config);
}

}  // namespace hrrt
