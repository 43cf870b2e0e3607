#pragma once

#include <Eigen/Dense>
#include <memory>
#include <json.hpp>
#include <string>
#include <vector>

#include "hrrt/geometry.hpp"
#include "hrrt/numerics.hpp"

namespace hrrt {

using nlohmann::json;

/// One point of the ambient space Z x U.
struct ConfigPoint {
  VectorXd z;
  VectorXd u;
};

/// Energy and all first/second derivative blocks at a point.
struct DerivativeBundle {
  double W = 0.0;
  VectorXd grad_z;  // N
  VectorXd grad_u;  // K
  MatrixXd H_zz;    // N x N
  MatrixXd H_uz;    // K x N
  MatrixXd H_uu;    // K x K

  VectorXd control_force() const { return -grad_u; }
};

struct GoalSpec {
  enum class Kind { StateRegion, ControlRegion };
  bool present = false;
  Kind kind = Kind::StateRegion;
  VectorXd center;
  VectorXd radius;  // per-coordinate tolerances, > 0

  bool contains(const VectorXd& z, const VectorXd& u) const {
    if (!present) return false;
    const VectorXd& v = (kind == Kind::StateRegion) ? z : u;
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v[i] - center[i]) > radius[i]) return false;
    }
    return true;
  }
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A manipulation-potential definition with parameters and dimensions.
/// Models are immutable after construction; energy and bundle evaluation are
/// pure and reentrant.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;

  const std::string& name() const { return name_; }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  bool analytic_derivatives() const { return analytic_; }

  const VectorXd& control_lo() const { return control_lo_; }
  const VectorXd& control_hi() const { return control_hi_; }
  bool in_control_bounds(const VectorXd& u) const {
    return (u.array() >= control_lo_.array() - 1e-12).all() && (u.array() <= control_hi_.array() + 1e-12).all();
  }

  const ConfigPoint& start() const { return start_; }
  const GoalSpec& goal() const { return goal_; }
  const json& config() const { return config_; }

  /// Characteristic force magnitude, used to scale residual tolerances.
  double force_scale() const { return force_scale_; }
  /// Per-coordinate state scale, used by branch deduplication.
  const VectorXd& state_scale() const { return state_scale_; }

  virtual double energy(const VectorXd& z, const VectorXd& u) const = 0;
  virtual DerivativeBundle evaluate_bundle(const ConfigPoint& point) const;
  /// Gradient of W with respect to z only; cheaper than a full bundle for the
  /// contact scenarios, where it is used inside Newton line searches.
  virtual VectorXd state_gradient(const ConfigPoint& point) const;
  /// Gradient of W with respect to u only (control force is its negation).
  virtual VectorXd control_gradient(const ConfigPoint& point) const;

  /// Default multi-start seed states for branch enumeration at control u.
  virtual std::vector<VectorXd> default_seed_grid(const VectorXd& u) const = 0;

  /// Canonical representative of a state for deduplication; scenarios with
  /// periodic coordinates wrap them here. Identity by default.
  virtual VectorXd canonical_state(VectorXd z) const { return z; }

  /// Count of contact terms dropped because the proxy solver failed.
  long contact_failures() const { return contact_failures_; }

  /// Names of the control coordinates, for CLI grid slices and CSV headers.
  const std::vector<std::string>& control_names() const { return control_names_; }
  const std::vector<std::string>& state_names() const { return state_names_; }

 protected:
  void check_dims(const ConfigPoint& p) const;
  /// Parses control_bounds, start, and goal; requires dims to be set already.
  void parse_common(const json& config);
  /// Fallback bundle: central differences of energy over the stacked (z, u).
  DerivativeBundle fd_bundle(const ConfigPoint& point) const;

  std::string name_;
  int state_dim_ = 0;
  int control_dim_ = 0;
  bool analytic_ = false;
  VectorXd control_lo_, control_hi_;
  ConfigPoint start_;
  GoalSpec goal_;
  json config_;
  double force_scale_ = 1.0;
  VectorXd state_scale_;
  std::vector<std::string> control_names_, state_names_;
  mutable long contact_failures_ = 0;
  FdScheme fd_scheme_{};
};

/// Build a scenario model from a parsed config document. Throws ConfigError
/// listing the offending keys on schema violations.
std::unique_ptr<ScenarioModel> build_scenario(const json& config);
std::unique_ptr<ScenarioModel> load_scenario_file(const std::string& path);

/// Shared config helpers.
GoalSpec parse_goal(const json& goal, int state_dim, int control_dim);
VectorXd parse_vector(const json& arr, int expected_size, const std::string& key);

}  // namespace hrrt
