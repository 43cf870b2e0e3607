#include <cmath>

#include "hrrt/scenarios.hpp"

namespace hrrt {

PendulumModel::PendulumModel(const PendulumParams& params, const json& config) : params_(params) {
  if (!(params_.m > 0.0) || !(params_.g > 0.0) || !(params_.L0 > 0.0) || !(params_.k > 0.0)) {
    throw ConfigError("pendulum params must be positive");
  }
  name_ = "pendulum";
  state_dim_ = 1;
  control_dim_ = 2;
  analytic_ = !params_.superellipse_contact;
  state_names_ = {"z_theta"};
  control_names_ = {"u_x", "u_y"};
  parse_common(config);
  force_scale_ = 0.5 * params_.m * params_.g * params_.L0 + params_.k * params_.L0;
  state_scale_ = VectorXd::Ones(1);

  if (params_.superellipse_contact) {
    double a1 = params_.L0 / 2.0, a2 = 0.05, eps = 0.2;
    if (config.contains("shapes") && !config.at("shapes").empty()) {
      const json& shape = config.at("shapes").at(0);
      a1 = shape.value("a1", a1);
      a2 = shape.value("a2", a2);
      eps = shape.value("eps", eps);
    }
    bar_ = Superellipse(a1, a2, eps);
    if (config.contains("stiffness")) {
      const json& s = config.at("stiffness");
      stiffness_ = StiffnessProfile(s.value("k_min", 0.0), s.value("k_max", 1e4), s.value("d0", 0.01));
    }
  }
}

double PendulumModel::energy(const VectorXd& z, const VectorXd& u) const {
  const double theta = z[0];
  const double grav = 0.5 * params_.m * params_.g * params_.L0 * std::sin(theta);
  if (!params_.superellipse_contact) {
    const Vector2d t = tip(theta);
    const double dx = u[0] - t.x(), dy = u[1] - t.y();
    return grav + 0.5 * params_.k * (dx * dx + dy * dy);
  }
  Superellipse bar = bar_;
  bar.pose = {bar_.a1 * std::cos(theta), bar_.a1 * std::sin(theta), theta};
  const Vector2d robot{u[0], u[1]};
  double contact = 0.0;
  try {
    const ProxyResult proxy = solve_proxy(bar, robot);
    const double k = contact_stiffness(stiffness_, proxy.gap);
    contact = 0.5 * k * proxy.distance * proxy.distance;
  } catch (const ProxyFailure&) {
    ++contact_failures_;
  }
  return grav + contact;
}

DerivativeBundle PendulumModel::evaluate_bundle(const ConfigPoint& point) const {
  check_dims(point);
  if (!analytic_) return fd_bundle(point);

  const double theta = point.z[0];
  const double ux = point.u[0], uy = point.u[1];
  const double c = std::cos(theta), s = std::sin(theta);
  const double m = params_.m, g = params_.g, L = params_.L0, k = params_.k;

  DerivativeBundle b;
  b.W = 0.5 * m * g * L * s + 0.5 * k * ((ux - L * c) * (ux - L * c) + (uy - L * s) * (uy - L * s));
  b.grad_z = VectorXd::Constant(1, 0.5 * m * g * L * c + k * L * (ux * s - uy * c));
  b.grad_u = VectorXd(2);
  b.grad_u << k * (ux - L * c), k * (uy - L * s);
  b.H_zz = MatrixXd::Constant(1, 1, -0.5 * m * g * L * s + k * L * (ux * c + uy * s));
  b.H_uz = MatrixXd(2, 1);
  b.H_uz << k * L * s, -k * L * c;
  b.H_uu = k * MatrixXd::Identity(2, 2);
  return b;
}

std::vector<VectorXd> PendulumModel::default_seed_grid(const VectorXd&) const {
  std::vector<VectorXd> seeds;
  const int n = 32;
  seeds.reserve(n);
  for (int i = 0; i < n; ++i) {
    seeds.push_back(VectorXd::Constant(1, -M_PI + i * (2.0 * M_PI / n)));
  }
  return seeds;
}

std::unique_ptr<ScenarioModel> make_pendulum(const json& config) {
  const json& p = config.at("params");
  PendulumParams params;
  params.m = p.value("m", params.m);
  params.g = p.value("g", params.g);
  params.L0 = p.value("L0", params.L0);
  params.k = p.value("k", params.k);
  params.superellipse_contact = p.value("superellipse_contact", false);
  return std::make_unique<PendulumModel>(params, config);
}

}  // namespace hrrt
