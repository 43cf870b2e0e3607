#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrrt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Central second-order finite-difference scheme. The per-coordinate step is
/// step_h * max(1, |x_j|).
struct FdScheme {
  double step_h = 1e-5;

  double step_for(double xj) const { return step_h * std::max(1.0, std::abs(xj)); }
};

struct NewtonSettings {
  double residual_tol = 1e-10;
  int max_iters = 50;
  double damping = 1.0;  // automatic halving (up to 4 times) on stagnation
};

struct DifferentiationError : std::runtime_error {
  explicit DifferentiationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularJacobianError : std::runtime_error {
  explicit SingularJacobianError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& msg, VectorXd last_state)
      : std::runtime_error(msg), last_valid_state(std::move(last_state)) {}
  VectorXd last_valid_state;
};

using VectorFn = std::function<VectorXd(const VectorXd&)>;
using ScalarFn = std::function<double(const VectorXd&)>;

/// Jacobian of f at x by central differences; column j differentiates along
/// coordinate j.
MatrixXd fd_jacobian(const VectorFn& f, const VectorXd& x, const FdScheme& scheme = {});

/// Gradient of a scalar function by central differences.
VectorXd fd_gradient(const ScalarFn& f, const VectorXd& x, const FdScheme& scheme = {});

/// Symmetric Hessian of a scalar function by central differences
/// (f(x+-h_i e_i +- h_j e_j) stencil). Optionally also returns the gradient,
/// reusing the axis evaluations.
MatrixXd fd_hessian(const ScalarFn& f, const VectorXd& x, const FdScheme& scheme = {},
                    VectorXd* gradient_out = nullptr);

struct NewtonResult {
  VectorXd z;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Damped Newton iteration z <- z - damping * J(z)^-1 r(z). Non-convergence is
/// reported through the flag, not an exception; a singular Jacobian throws.
NewtonResult newton_refine(const VectorFn& residual,
                           const std::function<MatrixXd(const VectorXd&)>& jac,
                           const VectorXd& z0, const NewtonSettings& settings);

using OdeRhs = std::function<VectorXd(double, const VectorXd&)>;
using StopPredicate = std::function<bool(const VectorXd&)>;

struct OdeSample {
  double t;
  VectorXd state;
};

struct OdeTrace {
  std::vector<OdeSample> samples;
  bool stopped_by_predicate = false;
};

/// One classical RK4 step.
VectorXd rk4_step(const OdeRhs& rhs, double t, const VectorXd& state, double dt);

/// Fixed-step classical RK4 over [t0, t1]. The trace begins at state0 and ends
/// either at t1 or at the first state for which stop_predicate holds (that
/// state is included and flagged).
OdeTrace integrate_fixed_step(const OdeRhs& rhs, const VectorXd& state0, double t0, double t1,
                              double dt, const StopPredicate& stop_predicate = nullptr);

}  // namespace hrrt
