#pragma once

#include <Eigen/Core>

#include "altmin/network.hpp"
#include "altmin/schedule.hpp"

namespace altmin {

/// J projected-gradient steps on f_i(z) - <lambda_i, z> over C_i starting
/// from warm (which must be feasible). Every iterate stays feasible.
Eigen::VectorXd local_pg(const AgentProblem& agent, const Eigen::VectorXd& lambda_i,
                         const Eigen::VectorXd& warm, int J, double tau_i);

/// Iteration certificate: smallest J with (1-gamma)^J (alpha_prev + Lz
/// beta) <= alpha_k, i.e. ceil(log_{1-gamma}(alpha_k / (alpha_prev + Lz
/// beta))), clamped at 0 when the warm start already certifies. gamma = 1
/// contracts exactly in one step.
int certify_iterations(double alpha_k, double alpha_prev, double beta_k, double gamma_i,
                       double Lz_i);

/// Lipschitz constant of lambda |-> argmin_{z in C} 1/2 z'Hz + h'z - <lambda, z>:
/// 1 / lambda_min(H).
double lipschitz_of_argmin(const Eigen::MatrixXd& H);

/// Smallest j such that ||z^j - z*|| <= alpha_k along the projected-gradient
/// path from warm (the reference oracle the certificate is compared against).
int exact_min_iterations(const AgentProblem& agent, const Eigen::VectorXd& lambda_i,
                         const Eigen::VectorXd& warm, double alpha_k, double tau_i,
                         int cap = 100000);

/// Per-agent certification state carried across outer iterations.
struct CertState {
  double gamma = 0.0;          // sigma_i / L_i
  double Lz = 0.0;             // argmin Lipschitz constant
  Eigen::VectorXd warm;        // previous local solution
  Eigen::VectorXd prev_param;  // previous multiplier parameter
  double beta = 0.0;           // ||param^{k-1} - param^{k-2}||
};

}  // namespace altmin
