#include <cmath>

#include "hrrt/scenarios.hpp"

namespace hrrt {

namespace {

Eigen::Vector3d parse_vec3(const json& p, const char* key, const Eigen::Vector3d& fallback) {
  if (!p.contains(key)) return fallback;
  const VectorXd v = parse_vector(p.at(key), 3, std::string("params.") + key);
  return {v[0], v[1], v[2]};
}

}  // namespace

BookshelfModel::BookshelfModel(const BookshelfParams& params, const json& config) : params_(params) {
  if ((params_.K_c.array() <= 0.0).any() || (params_.K_1.array() <= 0.0).any() || (params_.K_2.array() <= 0.0).any()) {
    throw ConfigError("bookshelf: stiffness matrices must be positive definite");
  }
  if (!(params_.w_slot < params_.w_book)) {
    throw ConfigError("bookshelf: requires w_slot < w_book (narrow slot), got w_slot=" +
                      std::to_string(params_.w_slot) + ", w_book=" + std::to_string(params_.w_book));
  }
  name_ = "bookshelf";
  state_dim_ = 9;
  control_dim_ = 3;
  state_names_ = {"zb_x", "zb_y", "zb_theta", "z1_x", "z1_y", "z1_theta", "z2_x", "z2_y", "z2_theta"};
  control_names_ = {"u_x", "u_y", "u_theta"};
  parse_common(config);

  std::vector<ShapeSpec> specs = parse_shapes(config.at("shapes"));
  const ShapeSpec& book = find_shape(specs, "book");
  if (std::abs(2.0 * book.shape.a1 - params_.w_book) > 1e-9) {
    throw ConfigError("bookshelf: book shape width 2*a1 must equal params.w_book");
  }
  auto body = [&](const std::string& role, std::vector<int> deps) {
    ShapeSpec& s = find_shape(specs, role);
    return SceneBody{role, s.shape, s.corners, std::move(deps)};
  };
  std::vector<SceneBody> bodies{body("book", {0, 1, 2}),      body("neighbor1", {3, 4, 5}),
                                body("neighbor2", {6, 7, 8}), body("wall_left", {}),
                                body("wall_right", {})};
  // Additional fixed fixtures (shelf back, dividers) may be declared in the
  // config; they only interact through explicitly listed contacts.
  for (ShapeSpec& s : specs) {
    bool known = false;
    for (const SceneBody& b : bodies) known = known || b.role == s.role;
    if (known) continue;
    if (!s.fixed_pose) throw ConfigError("bookshelf: extra shape '" + s.role + "' must carry a fixed pose");
    bodies.push_back(SceneBody{s.role, s.shape, s.corners, {}});
  }

  std::vector<ContactPair> pairs;
  if (config.contains("contacts")) {
    pairs = parse_contacts(config.at("contacts"), bodies);
  } else {
    pairs = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 3}, {2, 4}};
  }
  scene_ = std::make_unique<ContactScene>(std::move(bodies), std::move(pairs), parse_stiffness(config),
                                          [this](int b, const VectorXd& z) { return body_pose(b, z); });

  force_scale_ = params_.K_c.maxCoeff() * 0.1;
  state_scale_ = VectorXd::Ones(9);
}

Pose2 BookshelfModel::body_pose(int body, const VectorXd& z) const {
  switch (body) {
    case 0: return {z[0], z[1], z[2]};
    case 1: return {z[3], z[4], z[5]};
    case 2: return {z[6], z[7], z[8]};
    default: return scene_->bodies()[body].shape.pose;
  }
}

double BookshelfModel::energy(const VectorXd& z, const VectorXd& u) const {
  const Eigen::Vector3d db(u[0] - z[0], u[1] - z[1], u[2] - z[2]);
  const Eigen::Vector3d d1 = z.segment<3>(3) - params_.rest_1;
  const Eigen::Vector3d d2 = z.segment<3>(6) - params_.rest_2;
  double W = 0.5 * db.dot(params_.K_c.asDiagonal() * db);
  W += 0.5 * d1.dot(params_.K_1.asDiagonal() * d1);
  W += 0.5 * d2.dot(params_.K_2.asDiagonal() * d2);
  W += scene_->total_energy(z, &contact_failures_);
  return W;
}

DerivativeBundle BookshelfModel::evaluate_bundle(const ConfigPoint& point) const {
  check_dims(point);
  const VectorXd& z = point.z;
  const VectorXd& u = point.u;

  DerivativeBundle b;
  b.grad_z = VectorXd::Zero(9);
  b.grad_u = VectorXd::Zero(3);
  b.H_zz = MatrixXd::Zero(9, 9);
  b.H_uz = MatrixXd::Zero(3, 9);
  b.H_uu = MatrixXd::Zero(3, 3);

  const Eigen::Vector3d db(u[0] - z[0], u[1] - z[1], u[2] - z[2]);
  const Eigen::Vector3d f_spring = params_.K_c.asDiagonal() * db;
  const Eigen::Vector3d d1 = z.segment<3>(3) - params_.rest_1;
  const Eigen::Vector3d d2 = z.segment<3>(6) - params_.rest_2;
  const Eigen::Vector3d f1 = params_.K_1.asDiagonal() * d1;
  const Eigen::Vector3d f2 = params_.K_2.asDiagonal() * d2;

  b.W = 0.5 * (f_spring.dot(db) + f1.dot(d1) + f2.dot(d2));
  b.grad_z.segment<3>(0) = -f_spring;
  b.grad_z.segment<3>(3) = f1;
  b.grad_z.segment<3>(6) = f2;
  b.grad_u = f_spring;
  b.H_zz.block<3, 3>(0, 0) = params_.K_c.asDiagonal();
  b.H_zz.block<3, 3>(3, 3) = params_.K_1.asDiagonal();
  b.H_zz.block<3, 3>(6, 6) = params_.K_2.asDiagonal();
  b.H_uu = params_.K_c.asDiagonal();
  b.H_uz.block<3, 3>(0, 0) = -MatrixXd(params_.K_c.asDiagonal());

  accumulate_contact_fd(*scene_, z, fd_scheme_, &contact_failures_, b.W, b.grad_z, b.H_zz);
  return b;
}

VectorXd BookshelfModel::state_gradient(const ConfigPoint& point) const {
  check_dims(point);
  const VectorXd& z = point.z;
  const VectorXd& u = point.u;
  VectorXd g(9);
  const Eigen::Vector3d db(u[0] - z[0], u[1] - z[1], u[2] - z[2]);
  g.segment<3>(0) = -(params_.K_c.asDiagonal() * db);
  g.segment<3>(3) = params_.K_1.asDiagonal() * (z.segment<3>(3) - params_.rest_1);
  g.segment<3>(6) = params_.K_2.asDiagonal() * (z.segment<3>(6) - params_.rest_2);
  accumulate_contact_grad(*scene_, z, fd_scheme_, &contact_failures_, g);
  return g;
}

VectorXd BookshelfModel::control_gradient(const ConfigPoint& point) const {
  check_dims(point);
  const Eigen::Vector3d db(point.u[0] - point.z[0], point.u[1] - point.z[1], point.u[2] - point.z[2]);
  return params_.K_c.asDiagonal() * db;
}

std::vector<VectorXd> BookshelfModel::default_seed_grid(const VectorXd& u) const {
  std::vector<VectorXd> seeds;
  VectorXd rest(9);
  rest << start_.z[0], start_.z[1], start_.z[2], params_.rest_1[0], params_.rest_1[1], params_.rest_1[2],
      params_.rest_2[0], params_.rest_2[1], params_.rest_2[2];

  // Lattice over the held book's pose around the commanded pose; neighbours
  // seeded at rest.
  const double dx[3] = {-0.03, 0.0, 0.03};
  const double dy[3] = {-0.1, 0.0, 0.05};
  const double dth[3] = {-0.3, 0.0, 0.3};
  for (double ox : dx) {
    for (double oy : dy) {
      for (double oth : dth) {
        VectorXd s = rest;
        s[0] = u[0] + ox;
        s[1] = u[1] + oy;
        s[2] = u[2] + oth;
        seeds.push_back(s);
      }
    }
  }
  VectorXd s = rest;
  seeds.push_back(s);
  return seeds;
}

std::unique_ptr<ScenarioModel> make_bookshelf(const json& config) {
  const json& p = config.at("params");
  BookshelfParams params;
  params.K_c = parse_vec3(p, "K_c", params.K_c);
  params.K_1 = parse_vec3(p, "K_1", params.K_1);
  params.K_2 = parse_vec3(p, "K_2", params.K_2);
  params.rest_1 = parse_vec3(p, "rest_1", params.rest_1);
  params.rest_2 = parse_vec3(p, "rest_2", params.rest_2);
  params.w_book = p.value("w_book", params.w_book);
  params.w_slot = p.value("w_slot", params.w_slot);
  return std::make_unique<BookshelfModel>(params, config);
}

}  // namespace hrrt
