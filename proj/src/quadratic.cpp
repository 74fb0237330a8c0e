#include "altmin/quadratic.hpp"

#include <Eigen/Eigenvalues>

#include "altmin/errors.hpp"

namespace altmin {

QuadraticFn::QuadraticFn(Eigen::MatrixXd H, Eigen::VectorXd h) {
  if (H.rows() != H.cols() || H.rows() != h.size())
    throw ConfigError("QuadraticFn: dimension mismatch");
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * (1.0 + H.cwiseAbs().maxCoeff()))
    throw ConfigError("QuadraticFn: H is not symmetric");
  H_ = 0.5 * (H + H.transpose());
  h_ = std::move(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H_, Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues().minCoeff();
  lambda_max_ = eig.eigenvalues().maxCoeff();
  if (!(lambda_min_ > 0)) throw ConfigError("QuadraticFn: H is not positive definite");
  llt_.compute(H_);
  if (llt_.info() != Eigen::Success) throw ConfigError("QuadraticFn: Cholesky failed");
}

double QuadraticFn::value(const Eigen::VectorXd& z) const {
  return 0.5 * z.dot(H_ * z) + h_.dot(z);
}

Eigen::VectorXd QuadraticFn::gradient(const Eigen::VectorXd& z) const {
  return H_ * z + h_;
}

Eigen::VectorXd QuadraticFn::solve(const Eigen::VectorXd& rhs) const {
  return llt_.solve(rhs);
}

}  // namespace altmin
