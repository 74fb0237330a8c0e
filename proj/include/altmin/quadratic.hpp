#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace altmin {

/// Strictly convex quadratic 1/2 z'Hz + h'z with H symmetric positive
/// definite. Extreme eigenvalues and a Cholesky factor are computed once at
/// construction.
class QuadraticFn {
 public:
  QuadraticFn() = default;
  QuadraticFn(Eigen::MatrixXd H, Eigen::VectorXd h);

  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
  /// Solves H x = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& h() const { return h_; }
  Eigen::Index dim() const { return h_.size(); }

  /// Gradient Lipschitz constant: largest eigenvalue of H.
  double lipschitz() const { return lambda_max_; }
  /// Convexity modulus: smallest eigenvalue of H.
  double modulus() const { return lambda_min_; }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lambda_min_ = 0.0, lambda_max_ = 0.0;
};

}  // namespace altmin
