#include "hrrt/numerics.hpp"

#include <cmath>

namespace hrrt {

namespace {

void check_finite(const VectorXd& v, int coord, const char* what) {
  if (!v.allFinite()) {
    throw DifferentiationError(std::string(what) + ": non-finite function value while perturbing coordinate " +
                               std::to_string(coord));
  }
}

}  // namespace

MatrixXd fd_jacobian(const VectorFn& f, const VectorXd& x, const FdScheme& scheme) {
  VectorXd xp = x, xm = x;
  MatrixXd jac;
  for (int j = 0; j < x.size(); ++j) {
    const double h = scheme.step_for(x[j]);
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    VectorXd fp = f(xp);
    VectorXd fm = f(xm);
    check_finite(fp, j, "fd_jacobian");
    check_finite(fm, j, "fd_jacobian");
    if (jac.size() == 0) jac.resize(fp.size(), x.size());
    jac.col(j) = (fp - fm) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  if (jac.size() == 0) jac.resize(0, x.size());
  return jac;
}

VectorXd fd_gradient(const ScalarFn& f, const VectorXd& x, const FdScheme& scheme) {
  VectorXd g(x.size());
  VectorXd xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    const double h = scheme.step_for(x[j]);
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const double fp = f(xp);
    const double fm = f(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw DifferentiationError("fd_gradient: non-finite function value while perturbing coordinate " +
                                 std::to_string(j));
    }
    g[j] = (fp - fm) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return g;
}

MatrixXd fd_hessian(const ScalarFn& f, const VectorXd& x, const FdScheme& scheme, VectorXd* gradient_out) {
  const int n = static_cast<int>(x.size());
  MatrixXd hess(n, n);
  const double f0 = f(x);
  if (!std::isfinite(f0)) throw DifferentiationError("fd_hessian: non-finite function value at base point");

  VectorXd h(n);
  VectorXd fp(n), fm(n);
  VectorXd work = x;
  for (int i = 0; i < n; ++i) {
    h[i] = scheme.step_for(x[i]);
    work[i] = x[i] + h[i];
    fp[i] = f(work);
    work[i] = x[i] - h[i];
    fm[i] = f(work);
    work[i] = x[i];
    if (!std::isfinite(fp[i]) || !std::isfinite(fm[i])) {
      throw DifferentiationError("fd_hessian: non-finite function value while perturbing coordinate " +
                                 std::to_string(i));
    }
    hess(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h[i] * h[i]);
  }
  if (gradient_out) {
    gradient_out->resize(n);
    for (int i = 0; i < n; ++i) (*gradient_out)[i] = (fp[i] - fm[i]) / (2.0 * h[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      work[i] = x[i] + h[i];
      work[j] = x[j] + h[j];
      const double fpp = f(work);
      work[j] = x[j] - h[j];
      const double fpm = f(work);
      work[i] = x[i] - h[i];
      const double fmm = f(work);
      work[j] = x[j] + h[j];
      const double fmp = f(work);
      work[i] = x[i];
      work[j] = x[j];
      if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmm) || !std::isfinite(fmp)) {
        throw DifferentiationError("fd_hessian: non-finite cross term at coordinates " + std::to_string(i) + "," +
                                   std::to_string(j));
      }
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

NewtonResult newton_refine(const VectorFn& residual, const std::function<MatrixXd(const VectorXd&)>& jac,
                           const VectorXd& z0, const NewtonSettings& settings) {
  NewtonResult result;
  result.z = z0;
  VectorXd r = residual(result.z);
  double rnorm = r.norm();
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    if (rnorm <= settings.residual_tol) {
      result.converged = true;
      break;
    }
    MatrixXd J = jac(result.z);
    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible()) {
      throw SingularJacobianError("newton_refine: singular jacobian at iteration " + std::to_string(iter));
    }
    VectorXd step = lu.solve(r);
    double damping = settings.damping;
    VectorXd z_try;
    VectorXd r_try;
    double rnorm_try = rnorm;
    for (int halving = 0; halving <= 4; ++halving) {
      z_try = result.z - damping * step;
      r_try = residual(z_try);
      rnorm_try = r_try.norm();
      if (std::isfinite(rnorm_try) && rnorm_try < rnorm) break;
      damping *= 0.5;
    }
    result.z = z_try;
    r = r_try;
    rnorm = rnorm_try;
    result.iterations = iter + 1;
    if (!std::isfinite(rnorm)) break;
  }
  if (!result.converged && rnorm <= settings.residual_tol) result.converged = true;
  result.residual_norm = rnorm;
  return result;
}

VectorXd rk4_step(const OdeRhs& rhs, double t, const VectorXd& state, double dt) {
  VectorXd k1 = rhs(t, state);
  VectorXd k2 = rhs(t + 0.5 * dt, state + 0.5 * dt * k1);
  VectorXd k3 = rhs(t + 0.5 * dt, state + 0.5 * dt * k2);
  VectorXd k4 = rhs(t + dt, state + dt * k3);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

OdeTrace integrate_fixed_step(const OdeRhs& rhs, const VectorXd& state0, double t0, double t1, double dt,
                              const StopPredicate& stop_predicate) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_fixed_step: dt must be positive");
  OdeTrace trace;
  trace.samples.push_back({t0, state0});
  double t = t0;
  VectorXd state = state0;
  if (stop_predicate && stop_predicate(state)) {
    trace.stopped_by_predicate = true;
    return trace;
  }
  while (t < t1 - 1e-15) {
    const double step = std::min(dt, t1 - t);
    VectorXd next = rk4_step(rhs, t, state, step);
    if (!next.allFinite()) {
      throw IntegrationError("integrate_fixed_step: non-finite state at t=" + std::to_string(t + step), state);
    }
    t += step;
    state = std::move(next);
    trace.samples.push_back({t, state});
    if (stop_predicate && stop_predicate(state)) {
      trace.stopped_by_predicate = true;
      break;
    }
  }
  return trace;
}

}  // namespace hrrt
