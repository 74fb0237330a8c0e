#pragma once

#include <Eigen/Core>

#include "altmin/quadratic.hpp"

namespace altmin {

struct BoxQpResult {
  Eigen::VectorXd z;
  double kkt_residual = 0.0;  // inf-norm of z - Proj(z - grad)
  int pg_iterations = 0;
  int polish_rounds = 0;
};

struct BoxQpOptions {
  double tol = 1e-13;     // on the projected-gradient fixed-point residual
  int max_pg = 20000;     // PG iteration cap before giving up
  int max_polish = 40;    // active-set polish rounds
  const Eigen::VectorXd* warm = nullptr;
};

/// Exact solver for  min 1/2 z'Hz + q'z  s.t.  lo <= z <= hi.
///
/// Unconstrained coordinates may have infinite bounds; the fully unbounded
/// case reduces to a Cholesky solve. Constrained problems run projected
/// gradient to locate the active set, then polish by solving the free block
/// exactly until the KKT residual is below tol. Throws NumericalError when
/// the residual cannot be certified.
BoxQpResult solve_box_qp(const QuadraticFn& f, const Eigen::VectorXd& q_shift,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         const BoxQpOptions& opts = {});

/// Same, with the linear term given directly (minimizes 1/2 z'Hz + q'z).
BoxQpResult solve_box_qp_raw(const Eigen::MatrixXd& H, double lipschitz,
                             const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const BoxQpOptions& opts = {});

}  // namespace altmin
