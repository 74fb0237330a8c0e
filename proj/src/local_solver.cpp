#include "altmin/local_solver.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "altmin/errors.hpp"

namespace altmin {

Eigen::VectorXd local_pg(const AgentProblem& agent, const Eigen::VectorXd& lambda_i,
                         const Eigen::VectorXd& warm, int J, double tau_i) {
  if (!(tau_i > 0 && tau_i < 1.0 / agent.lipschitz()))
    throw ConfigError("local_pg: step size must satisfy tau_i < 1/L(grad f_i)");
  if (J < 0) throw ConfigError("local_pg: J must be >= 0");
  if (!agent.set.contains(warm, 1e-9)) throw ConfigError("local_pg: warm start infeasible");
  Eigen::VectorXd z = warm;
  for (int j = 0; j < J; ++j)
    z = agent.set.project(z - tau_i * (agent.f.gradient(z) - lambda_i));
  return z;
}

int certify_iterations(double alpha_k, double alpha_prev, double beta_k, double gamma_i,
                       double Lz_i) {
  if (!(alpha_k > 0) || !(alpha_prev > 0))
    throw ConfigError("certify_iterations: decrease values must be > 0");
  if (beta_k < 0) throw ConfigError("certify_iterations: beta must be >= 0");
  if (!(gamma_i > 0 && gamma_i <= 1)) throw ConfigError("certify_iterations: gamma in (0,1]");
  const double ratio = alpha_k / (alpha_prev + Lz_i * beta_k);
  if (ratio >= 1.0) return 0;
  if (gamma_i == 1.0) return 1;  // exact contraction in one step
  const double j = std::log(ratio) / std::log(1.0 - gamma_i);
  return static_cast<int>(std::ceil(j - 1e-12));
}

double lipschitz_of_argmin(const Eigen::MatrixXd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmin > 0)) throw ConfigError("lipschitz_of_argmin: H must be positive definite");
  return 1.0 / lmin;
}

int exact_min_iterations(const AgentProblem& agent, const Eigen::VectorXd& lambda_i,
                         const Eigen::VectorXd& warm, double alpha_k, double tau_i, int cap) {
  if (!(alpha_k > 0)) throw ConfigError("exact_min_iterations: alpha must be > 0");
  Eigen::VectorXd z_star = agent_exact_solve(agent, lambda_i, &warm);
  Eigen::VectorXd z = warm;
  if ((z - z_star).norm() <= alpha_k) return 0;
  for (int j = 1; j <= cap; ++j) {
    z = agent.set.project(z - tau_i * (agent.f.gradient(z) - lambda_i));
    if ((z - z_star).norm() <= alpha_k) return j;
  }
  throw NumericalError("exact_min_iterations: cap of " + std::to_string(cap) +
                       " iterations exceeded");
}

}  // namespace altmin
