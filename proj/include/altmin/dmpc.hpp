#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "altmin/network.hpp"

namespace altmin {

/// Discrete-time agent dynamics x_i(t+1) = A x_i(t) + sum_{j in N_i} B[j] u_j(t),
/// coupled through inputs only, with a per-step input box.
struct LtiAgent {
  Eigen::MatrixXd A;                   // n_x x n_x
  std::map<int, Eigen::MatrixXd> B;    // j -> n_x x n_u, keys == N_i
  Eigen::VectorXd x0;                  // initial state
  Eigen::VectorXd u_lo, u_hi;          // per-step input bounds (size n_u)
};

struct MpcSpec {
  int N = 1;            // horizon
  Eigen::MatrixXd Q, R, P;  // stage state/input and terminal weights, all PD
};

/// Prediction matrices over the horizon: x = Phi x0 + Gamma u_stack with
/// u_stack the neighborhood input sequences in ascending agent order.
struct Prediction {
  Eigen::MatrixXd Phi;    // (N n_x) x n_x
  Eigen::MatrixXd Gamma;  // (N n_x) x (N n_u |N_i|)
};
Prediction build_prediction(const LtiAgent& agent, const MpcSpec& spec,
                            const std::vector<int>& neighbors);

/// True when rank [B, AB, ..., A^{n-1}B] = n.
bool controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct CondenseResult {
  NetworkProblem problem;
  std::vector<bool> ridge_applied;  // per-agent record of the degeneracy guard
};

/// Eliminates the states: per agent i the cost over its neighborhood input
/// stack z_i is 1/2 z'H_i z + h_i'z with H_i = Gamma'Qbar Gamma + Rbar,
/// h_i = Gamma'Qbar Phi x0, Qbar = blkdiag(Q,...,Q,P). Each copy of u_j
/// carries R/|N_j| so the network-wide sum counts each input cost once and
/// every H_i stays positive definite. C_i is the product of the input boxes
/// over the neighborhood and the horizon.
CondenseResult condense(const std::vector<LtiAgent>& agents, const MpcSpec& spec,
                        const Network& net);

struct GeneratorParams {
  int M = 40, nx = 3, nu = 2, N = 11;
  std::uint64_t seed = 1;
  int deg_min = 1, deg_max = 2;         // neighbor count range (excluding self)
  double box_lo = -0.4, box_hi = 0.3;
  double rho_min = 0.3, rho_max = 1.1;  // spectral radius range (cap 1.1)
  double b_gain = 0.6;                  // per-neighbor condensed gain target
  double activation_scale = 1.0;        // scales the initial states
  double activation_target = -1.0;      // > 0: bisect the scale for this active fraction
  int resample_budget = 64;
};

struct GeneratedInstance {
  std::vector<LtiAgent> dynamics;
  MpcSpec spec;
  Network net;
  CondenseResult condensed;
  double activation_scale_used = 1.0;
  double achieved_activation = 0.0;  // fraction of u* entries at bounds
  GeneratorParams params;
};

/// Random connected instance matching the benchmark layout: spanning tree
/// plus extra edges within the degree range, controllable (A_ii, B_ii)
/// enforced by resampling, B blocks normalized by the local impulse-response
/// gain, initial states scaled (optionally bisected to hit an activation
/// target).
GeneratedInstance generate_random_instance(const GeneratorParams& params);

/// Fraction of u* entries at their bounds.
double activation_fraction(const NetworkProblem& np, const Eigen::VectorXd& u_star,
                           double tol = 1e-8);

/// Forward simulation of the true dynamics under stacked neighborhood
/// inputs; the independent check of the prediction matrices.
Eigen::VectorXd simulate_states(const LtiAgent& agent, const MpcSpec& spec,
                                const std::vector<int>& neighbors, const Eigen::VectorXd& u_stack);

}  // namespace altmin
