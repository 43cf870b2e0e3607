#pragma once

#include <memory>

#include "hrrt/contact_scene.hpp"
#include "hrrt/potentials.hpp"

namespace hrrt {

struct PendulumParams {
  double m = 1.0;
  double g = 9.81;
  double L0 = 1.0;
  double k = 100.0;
  bool superellipse_contact = false;
};

/// Hinged pendulum pushed by a 2D point robot. z = pendulum angle, u = robot
/// position. The default contact term is the constant-k tip spring with fully
/// analytic derivatives; the superellipse variant swaps in k(d) contact
/// against the pendulum bar and falls back to finite differences.
class PendulumModel : public ScenarioModel {
 public:
  PendulumModel(const PendulumParams& params, const json& config);

  double energy(const VectorXd& z, const VectorXd& u) const override;
  DerivativeBundle evaluate_bundle(const ConfigPoint& point) const override;
  std::vector<VectorXd> default_seed_grid(const VectorXd& u) const override;

  VectorXd canonical_state(VectorXd z) const override {
    z[0] = std::remainder(z[0], 2.0 * M_PI);
    return z;
  }

  const PendulumParams& params() const { return params_; }
  /// World position of the pendulum tip at angle theta.
  Vector2d tip(double theta) const { return {params_.L0 * std::cos(theta), params_.L0 * std::sin(theta)}; }

 private:
  PendulumParams params_;
  Superellipse bar_;            // superellipse variant only
  StiffnessProfile stiffness_;  // superellipse variant only
};

struct ClipParams {
  Vector2d K_c{500.0, 500.0};  // diagonal control stiffness
  double k_theta = 2.0;
  double z_theta0 = -0.4;
  Vector2d hinge{0.0, 0.3};
  double ee_x = -0.46;     // horizontal position of the lever-pushing arm
  double object_y = 0.18;  // height of the object's sliding rail
  double k_reg = 0.0;      // optional quadratic tie of z_r to its start value
};

/// Spring-loaded clip: a bar hinged at its centre (jaw right, lever left), an
/// end effector pushing the lever down, and an object sliding in from the
/// right. z = [z_theta, z_ly, z_rx], u = [u_ly, u_rx].
class ClipModel : public ScenarioModel {
 public:
  ClipModel(const ClipParams& params, const json& config);

  double energy(const VectorXd& z, const VectorXd& u) const override;
  DerivativeBundle evaluate_bundle(const ConfigPoint& point) const override;
  VectorXd state_gradient(const ConfigPoint& point) const override;
  VectorXd control_gradient(const ConfigPoint& point) const override;
  std::vector<VectorXd> default_seed_grid(const VectorXd& u) const override;

  const ClipParams& params() const { return params_; }
  const ContactScene& scene() const { return *scene_; }

 private:
  Pose2 body_pose(int body, const VectorXd& z) const;

  ClipParams params_;
  std::unique_ptr<ContactScene> scene_;
  VectorXd seed_lo_, seed_hi_;
  VectorXd z_r_ref_;
};

struct BookshelfParams {
  Eigen::Vector3d K_c{500.0, 500.0, 20.0};
  Eigen::Vector3d K_1{300.0, 300.0, 5.0};
  Eigen::Vector3d K_2{300.0, 300.0, 5.0};
  Eigen::Vector3d rest_1{-0.09, 0.0, 0.0};
  Eigen::Vector3d rest_2{0.09, 0.0, 0.0};
  double w_book = 0.12;
  double w_slot = 0.08;  // must be < w_book
};

/// Crowded bookshelf insertion: a held book pushed into a slot narrower than
/// itself between two spring-mounted neighbour books. z = [z_b, z_1, z_2]
/// (each a planar pose), u = commanded pose of the held book.
class BookshelfModel : public ScenarioModel {
 public:
  BookshelfModel(const BookshelfParams& params, const json& config);

  double energy(const VectorXd& z, const VectorXd& u) const override;
  DerivativeBundle evaluate_bundle(const ConfigPoint& point) const override;
  VectorXd state_gradient(const ConfigPoint& point) const override;
  VectorXd control_gradient(const ConfigPoint& point) const override;
  std::vector<VectorXd> default_seed_grid(const VectorXd& u) const override;

  const BookshelfParams& params() const { return params_; }
  const ContactScene& scene() const { return *scene_; }

 private:
  Pose2 body_pose(int body, const VectorXd& z) const;

  BookshelfParams params_;
  std::unique_ptr<ContactScene> scene_;
};

std::unique_ptr<ScenarioModel> make_pendulum(const json& config);
std::unique_ptr<ScenarioModel> make_clip(const json& config);
std::unique_ptr<ScenarioModel> make_bookshelf(const json& config);

}  // namespace hrrt
