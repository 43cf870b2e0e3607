#pragma once

#include <fstream>
#include <random>
#include <sstream>

#include "hrrt/scenarios.hpp"

namespace hrrt::test {

inline json load_config(const std::string& name) {
  const std::string path = std::string(HRRT_CONFIG_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

/// Fully quadratic potential W = 1/2 z'Az + z'Bu + 1/2 u'Cu, analytic bundle.
/// The Schur complement of its Hessian has the closed form C - B'A^-1 B.
class QuadraticModel : public ScenarioModel {
 public:
  QuadraticModel(MatrixXd A, MatrixXd B, MatrixXd C)
      : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
    name_ = "quadratic";
    state_dim_ = static_cast<int>(A_.rows());
    control_dim_ = static_cast<int>(C_.rows());
    analytic_ = true;
    control_lo_ = VectorXd::Constant(control_dim_, -100.0);
    control_hi_ = VectorXd::Constant(control_dim_, 100.0);
    start_.z = VectorXd::Zero(state_dim_);
    start_.u = VectorXd::Zero(control_dim_);
    force_scale_ = 1.0;
    state_scale_ = VectorXd::Ones(state_dim_);
    for (int i = 0; i < state_dim_; ++i) state_names_.push_back("z" + std::to_string(i));
    for (int i = 0; i < control_dim_; ++i) control_names_.push_back("u" + std::to_string(i));
  }

  double energy(const VectorXd& z, const VectorXd& u) const override {
    return 0.5 * z.dot(A_ * z) + z.dot(B_ * u) + 0.5 * u.dot(C_ * u);
  }

  DerivativeBundle evaluate_bundle(const ConfigPoint& p) const override {
    DerivativeBundle b;
    b.W = energy(p.z, p.u);
    b.grad_z = A_ * p.z + B_ * p.u;
    b.grad_u = B_.transpose() * p.z + C_ * p.u;
    b.H_zz = A_;
    b.H_uz = B_.transpose();
    b.H_uu = C_;
    return b;
  }

  std::vector<VectorXd> default_seed_grid(const VectorXd&) const override {
    return {VectorXd::Zero(state_dim_)};
  }

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }

 private:
  MatrixXd A_, B_, C_;
};

/// Random SPD matrix with eigenvalues in [lo, hi].
inline MatrixXd random_spd(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 5.0) {
  std::normal_distribution<double> gauss;
  MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(M);
  MatrixXd Q = qr.householderQ();
  std::uniform_real_distribution<double> eig(lo, hi);
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = eig(rng);
  return Q * d.asDiagonal() * Q.transpose();
}

inline MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = gauss(rng);
  return M;
}

}  // namespace hrrt::test
