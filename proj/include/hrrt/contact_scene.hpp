#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hrrt/geometry.hpp"
#include "hrrt/potentials.hpp"

namespace hrrt {

/// A rigid body of a contact scenario. `state_deps` lists the internal-state
/// coordinates its pose depends on (empty for fixed bodies).
struct SceneBody {
  std::string role;
  Superellipse shape;                  // pose filled in per evaluation
  std::vector<double> corner_gammas;   // surface parameters of its corner points
  std::vector<int> state_deps;
};

/// Corner-points-of-one-body against surface-of-another contact pair.
struct ContactPair {
  int corner_body = -1;
  int surface_body = -1;
};

/// Superellipse contact energy shared by the clip and bookshelf scenarios:
/// sum over corner points c of 1/2 k(d) |c - p(gamma*)|^2 with the proxy
/// p(gamma*) re-solved at every evaluation.
class ContactScene {
 public:
  using PoseFn = std::function<Pose2(int body_index, const VectorXd& z)>;

  ContactScene(std::vector<SceneBody> bodies, std::vector<ContactPair> pairs, StiffnessProfile stiffness,
               PoseFn pose_fn, int proxy_restarts = 8);

  const std::vector<SceneBody>& bodies() const { return bodies_; }
  const std::vector<ContactPair>& pairs() const { return pairs_; }
  int find_body(const std::string& role) const;

  /// Internal-state coordinates pair `i` depends on (union of both bodies').
  const std::vector<int>& pair_deps(int i) const { return pair_deps_[i]; }

  /// Energy of one pair at state z. Proxy failures drop the corner term and
  /// bump the failure counter.
  double pair_energy(int pair_index, const VectorXd& z, long* failure_counter) const;

  double total_energy(const VectorXd& z, long* failure_counter) const;

 private:
  std::vector<SceneBody> bodies_;
  std::vector<ContactPair> pairs_;
  std::vector<std::vector<int>> pair_deps_;
  StiffnessProfile stiffness_;
  PoseFn pose_fn_;
  int proxy_restarts_;
};

/// Default corner parameter set {pi/4, 3pi/4, 5pi/4, 7pi/4}.
std::vector<double> default_corner_gammas();

/// Parsed entry of the config's shapes[] array.
struct ShapeSpec {
  std::string role;
  Superellipse shape;
  std::vector<double> corners;
  bool fixed_pose = false;  // true when the config pins the pose
};

std::vector<ShapeSpec> parse_shapes(const json& shapes_array);
ShapeSpec& find_shape(std::vector<ShapeSpec>& specs, const std::string& role);
StiffnessProfile parse_stiffness(const json& config);
std::vector<ContactPair> parse_contacts(const json& contacts_array, const std::vector<SceneBody>& bodies);

/// Adds the scene's contact energy and its state-space derivatives to a
/// bundle. Each pair is differentiated only over the coordinates it depends
/// on; the contact terms never depend on u.
void accumulate_contact_fd(const ContactScene& scene, const VectorXd& z, const FdScheme& scheme,
                           long* failure_counter, double& W, VectorXd& grad_z, MatrixXd& H_zz);

/// Gradient-only variant of accumulate_contact_fd.
void accumulate_contact_grad(const ContactScene& scene, const VectorXd& z, const FdScheme& scheme,
                             long* failure_counter, VectorXd& grad_z);

}  // namespace hrrt
