#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace hrrt;
using hrrt::test::load_config;

namespace {

// Straightforward stacked central differences over the scenario energy, written
// out here so the check does not share code with ScenarioModel::fd_bundle.
struct StackedFd {
  VectorXd grad;
  MatrixXd hess;
};

StackedFd stacked_fd(const ScenarioModel& model, const VectorXd& z, const VectorXd& u, double h_rel = 1e-5) {
  const int n = static_cast<int>(z.size()), k = static_cast<int>(u.size());
  VectorXd x(n + k);
  x << z, u;
  auto eval = [&](const VectorXd& s) { return model.energy(s.head(n), s.tail(k)); };
  const double f0 = eval(x);
  StackedFd out;
  out.grad.resize(n + k);
  out.hess.resize(n + k, n + k);
  VectorXd h(n + k);
  VectorXd fp(n + k), fm(n + k);
  VectorXd w = x;
  for (int i = 0; i < n + k; ++i) {
    h[i] = h_rel * std::max(1.0, std::abs(x[i]));
    w[i] = x[i] + h[i];
    fp[i] = eval(w);
    w[i] = x[i] - h[i];
    fm[i] = eval(w);
    w[i] = x[i];
    out.grad[i] = (fp[i] - fm[i]) / (2.0 * h[i]);
    out.hess(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h[i] * h[i]);
  }
  for (int i = 0; i < n + k; ++i) {
    for (int j = i + 1; j < n + k; ++j) {
      w[i] = x[i] + h[i];
      w[j] = x[j] + h[j];
      const double fpp = eval(w);
      w[j] = x[j] - h[j];
      const double fpm = eval(w);
      w[i] = x[i] - h[i];
      const double fmm = eval(w);
      w[j] = x[j] + h[j];
      const double fmp = eval(w);
      w[i] = x[i];
      w[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      out.hess(i, j) = v;
      out.hess(j, i) = v;
    }
  }
  return out;
}

void check_bundle_against_fd(const ScenarioModel& model, const VectorXd& z, const VectorXd& u, double grad_tol,
                             double hess_tol) {
  const int n = static_cast<int>(z.size()), k = static_cast<int>(u.size());
  DerivativeBundle b = model.evaluate_bundle({z, u});
  StackedFd fd = stacked_fd(model, z, u);

  VectorXd grad(n + k);
  grad << b.grad_z, b.grad_u;
  MatrixXd hess(n + k, n + k);
  hess.topLeftCorner(n, n) = b.H_zz;
  hess.bottomLeftCorner(k, n) = b.H_uz;
  hess.topRightCorner(n, k) = b.H_uz.transpose();
  hess.bottomRightCorner(k, k) = b.H_uu;

  CHECK((grad - fd.grad).norm() <= grad_tol * std::max(1.0, fd.grad.norm()));
  CHECK((hess - fd.hess).norm() <= hess_tol * std::max(1.0, fd.hess.norm()));
}

}  // namespace

TEST_CASE("pendulum closed form at the hanging point") {
  auto model = build_scenario(load_config("pendulum.json"));
  VectorXd z = VectorXd::Constant(1, -M_PI / 2.0);
  VectorXd u(2);
  u << 0.0, -1.0;
  DerivativeBundle b = model->evaluate_bundle({z, u});
  CHECK(b.W == doctest::Approx(-0.5 * 9.81).epsilon(1e-10));
  CHECK(std::abs(b.grad_z[0]) < 1e-8);
  CHECK(b.H_zz(0, 0) == doctest::Approx(0.5 * 9.81 + 100.0).epsilon(1e-8));
  CHECK(b.grad_u.norm() < 1e-8);
  CHECK((b.control_force() + b.grad_u).norm() == 0.0);
}

TEST_CASE("pendulum analytic bundle matches its own finite differences") {
  auto model = build_scenario(load_config("pendulum.json"));
  REQUIRE(model->analytic_derivatives());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), pos(-1.6, 1.6);
  for (int i = 0; i < 25; ++i) {
    VectorXd z = VectorXd::Constant(1, ang(rng));
    VectorXd u(2);
    u << pos(rng), pos(rng);
    check_bundle_against_fd(*model, z, u, 1e-6, 1e-5);
  }
}

TEST_CASE("pendulum energy is 2pi-periodic in the angle") {
  auto model = build_scenario(load_config("pendulum.json"));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), pos(-1.6, 1.6);
  for (int i = 0; i < 20; ++i) {
    VectorXd z = VectorXd::Constant(1, ang(rng));
    VectorXd u(2);
    u << pos(rng), pos(rng);
    const double w0 = model->energy(z, u);
    const double w1 = model->energy(VectorXd::Constant(1, z[0] + 2.0 * M_PI), u);
    CHECK(std::abs(w0 - w1) < 1e-10 * std::max(1.0, std::abs(w0)));
  }
}

TEST_CASE("clip energy vanishes at rest with the object far away") {
  auto model = build_scenario(load_config("clip.json"));
  CHECK(model->state_dim() == 3);
  CHECK(model->control_dim() == 2);
  VectorXd z(3), u(2);
  z << -0.4, 0.65, 0.85;
  u << 0.65, 0.85;
  CHECK(model->energy(z, u) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bookshelf energy vanishes at the rest configuration") {
  auto model = build_scenario(load_config("bookshelf.json"));
  CHECK(model->state_dim() == 9);
  CHECK(model->control_dim() == 3);
  VectorXd z(9), u(3);
  z << 0.0, -0.3, 0.0, -0.09, 0.0, 0.0, 0.09, 0.0, 0.0;
  u << 0.0, -0.3, 0.0;
  CHECK(model->energy(z, u) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(model->control_gradient({z, u}).norm() < 1e-12);
}

TEST_CASE("clip and bookshelf energies are non-negative") {
  auto clip = build_scenario(load_config("clip.json"));
  auto shelf = build_scenario(load_config("bookshelf.json"));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    VectorXd zc(3), uc(2);
    zc << -0.4 + 0.5 * uni(rng), 0.5 + 0.3 * uni(rng), 0.55 + 0.3 * uni(rng);
    uc << 0.49 + 0.21 * uni(rng), 0.55 + 0.35 * uni(rng);
    CHECK(clip->energy(zc, uc) >= 0.0);

    VectorXd zb(9), ub(3);
    ub << 0.12 * uni(rng), -0.15 + 0.2 * uni(rng), 0.3 * uni(rng);
    zb << ub[0] + 0.02 * uni(rng), ub[1] + 0.02 * uni(rng), ub[2] + 0.05 * uni(rng), -0.09 + 0.02 * uni(rng),
        0.02 * uni(rng), 0.05 * uni(rng), 0.09 + 0.02 * uni(rng), 0.02 * uni(rng), 0.05 * uni(rng);
    CHECK(shelf->energy(zb, ub) >= 0.0);
  }
}

TEST_CASE("bundles match independent finite differences at random in-bounds points") {
  auto pendulum = build_scenario(load_config("pendulum.json"));
  auto clip = build_scenario(load_config("clip.json"));
  auto shelf = build_scenario(load_config("bookshelf.json"));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto span = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

  for (int i = 0; i < 20; ++i) {
    VectorXd z = VectorXd::Constant(1, span(-M_PI, M_PI));
    VectorXd u(2);
    u << span(-1.6, 1.6), span(-1.6, 1.6);
    check_bundle_against_fd(*pendulum, z, u, 1e-5, 1e-3);
  }
  for (int i = 0; i < 20; ++i) {
    VectorXd z(3), u(2);
    z << span(-0.6, 0.3), span(0.28, 0.7), span(0.2, 0.9);
    u << span(0.28, 0.7), span(0.2, 0.9);
    check_bundle_against_fd(*clip, z, u, 1e-5, 1e-3);
  }
  for (int i = 0; i < 10; ++i) {
    VectorXd u(3), z(9);
    u << span(-0.12, 0.12), span(-0.35, 0.06), span(-0.6, 0.6);
    z << u[0] + span(-0.02, 0.02), u[1] + span(-0.02, 0.02), u[2] + span(-0.05, 0.05), -0.09 + span(-0.02, 0.02),
        span(-0.02, 0.02), span(-0.05, 0.05), 0.09 + span(-0.02, 0.02), span(-0.02, 0.02), span(-0.05, 0.05);
    check_bundle_against_fd(*shelf, z, u, 1e-5, 1e-3);
  }
}

TEST_CASE("mixed Hessian block is symmetric in differentiation order") {
  auto clip = build_scenario(load_config("clip.json"));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto span = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  for (int i = 0; i < 10; ++i) {
    VectorXd z(3), u(2);
    z << span(-0.6, 0.3), span(0.28, 0.7), span(0.2, 0.9);
    u << span(0.28, 0.7), span(0.2, 0.9);
    DerivativeBundle b = clip->evaluate_bundle({z, u});

    // d/dz of grad_u versus d/du of grad_z, both via the analytic gradients.
    MatrixXd uz(2, 3), zu(3, 2);
    const FdScheme scheme;
    for (int j = 0; j < 3; ++j) {
      const double h = scheme.step_for(z[j]);
      VectorXd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      uz.col(j) = (clip->control_gradient({zp, u}) - clip->control_gradient({zm, u})) / (2.0 * h);
    }
    for (int j = 0; j < 2; ++j) {
      const double h = scheme.step_for(u[j]);
      VectorXd up = u, um = u;
      up[j] += h;
      um[j] -= h;
      zu.col(j) = (clip->state_gradient({z, up}) - clip->state_gradient({z, um})) / (2.0 * h);
    }
    CHECK((uz - zu.transpose()).norm() < 1e-6 * std::max(1.0, uz.norm()));
    CHECK((b.H_uz - uz).norm() < 1e-5 * std::max(1.0, uz.norm()));
    CHECK((b.H_zz - b.H_zz.transpose()).norm() < 1e-9 * std::max(1.0, b.H_zz.norm()));
    CHECK((b.H_uu - b.H_uu.transpose()).norm() < 1e-9 * std::max(1.0, b.H_uu.norm()));
  }
}

TEST_CASE("build_scenario validates configs") {
  json bad = load_config("bookshelf.json");
  bad["params"]["w_slot"] = 0.2;  // wider than the book
  CHECK_THROWS_AS(build_scenario(bad), ConfigError);

  json missing = load_config("pendulum.json");
  missing.erase("control_bounds");
  CHECK_THROWS_AS(build_scenario(missing), ConfigError);

  json unknown = load_config("pendulum.json");
  unknown["scenario"] = "mystery";
  CHECK_THROWS_AS(build_scenario(unknown), ConfigError);
}

TEST_CASE("state and control gradients agree with the bundle") {
  auto shelf = build_scenario(load_config("bookshelf.json"));
  VectorXd u(3), z(9);
  u << 0.01, -0.12, 0.1;
  z << 0.012, -0.118, 0.09, -0.088, 0.003, -0.01, 0.091, 0.002, 0.012;
  DerivativeBundle b = shelf->evaluate_bundle({z, u});
  CHECK((shelf->state_gradient({z, u}) - b.grad_z).norm() < 1e-6 * std::max(1.0, b.grad_z.norm()));
  CHECK((shelf->control_gradient({z, u}) - b.grad_u).norm() < 1e-8 * std::max(1.0, b.grad_u.norm()));
}
