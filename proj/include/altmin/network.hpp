#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "altmin/convex_set.hpp"
#include "altmin/quadratic.hpp"
#include "altmin/split_problem.hpp"

namespace altmin {

/// Undirected agent graph. Neighbor sets are sorted ascending and always
/// include the agent itself.
struct Network {
  int M = 0;
  std::vector<std::vector<int>> neighbors;

  static Network from_edges(int M, const std::vector<std::pair<int, int>>& edges);
  bool connected() const;
  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }  // |N_i|
};

/// 0/1 selection maps between the global variable v (one block per agent)
/// and the per-agent neighborhood stacks z_i = E_i v. Neighborhood blocks
/// are ordered by ascending agent index.
class SelectionMap {
 public:
  SelectionMap() = default;
  SelectionMap(Network net, std::vector<Eigen::Index> block_dims);

  Eigen::Index global_dim() const { return global_dim_; }
  Eigen::Index total_z_dim() const { return total_z_dim_; }
  Eigen::Index block_dim(int i) const { return block_dims_[i]; }
  Eigen::Index v_offset(int i) const { return v_offsets_[i]; }
  Eigen::Index z_dim(int i) const { return z_dims_[i]; }
  Eigen::Index z_offset(int i) const { return z_offsets_[i]; }
  const Network& network() const { return net_; }

  /// z_i = E_i v.
  Eigen::VectorXd apply_E(int i, const Eigen::VectorXd& v) const;
  /// [z_j]_i = F_ji z_j, the copy of agent i's block held by neighbor j.
  Eigen::VectorXd apply_F(int j, int i, const Eigen::VectorXd& z_j) const;
  /// Offset of agent i's block inside z_j (j must neighbor i).
  Eigen::Index copy_offset(int j, int i) const;

  /// Stacked E = [E_1; ...; E_M] as a sparse 0/1 matrix.
  Eigen::SparseMatrix<double> stacked_E() const;

  /// sum_i E_i' lambda_i stacked; equals E' lambda.
  Eigen::VectorXd Et_apply(const std::vector<Eigen::VectorXd>& per_agent) const;

 private:
  Network net_;
  std::vector<Eigen::Index> block_dims_, v_offsets_, z_dims_, z_offsets_;
  Eigen::Index global_dim_ = 0, total_z_dim_ = 0;
};

/// One agent's data: strictly convex quadratic over its neighborhood stack
/// plus a local constraint set.
struct AgentProblem {
  QuadraticFn f;
  ConvexSet set;
  double sigma() const { return f.modulus(); }
  double lipschitz() const { return f.lipschitz(); }
};

/// Exact local oracle: argmin_{z in C} f(z) - <lambda, z>.
Eigen::VectorXd agent_exact_solve(const AgentProblem& agent, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd* warm = nullptr, double tol = 1e-13);

/// Graph-structured problem: agents + network + selection maps.
struct NetworkProblem {
  std::vector<AgentProblem> agents;
  Network net;
  SelectionMap maps;

  NetworkProblem() = default;
  /// block_dims[i] is the dimension of the global variable's i-th block;
  /// agent i's objective lives on the stack of its neighborhood's blocks.
  NetworkProblem(std::vector<AgentProblem> a, Network n, std::vector<Eigen::Index> block_dims);
  int M() const { return net.M; }
  double sigma_f() const;
  /// gamma = lmin(H)/lmax(H) over the block-diagonal quadratic part.
  double gamma_quadratic() const;
  /// argmin_{z in C_i} f_i(z) - <lambda_i, z>, exact local oracle.
  Eigen::VectorXd local_solve(int i, const Eigen::VectorXd& lambda_i,
                              const Eigen::VectorXd* warm = nullptr, double tol = 1e-13) const;
};

/// The consensus step: each global block is the mean of the copies held by
/// its neighbors, summed in ascending agent order (deterministic).
/// Algebraically (E'E)^{-1} E' ztilde.
Eigen::VectorXd consensus(const std::vector<Eigen::VectorXd>& ztilde, const SelectionMap& maps);

/// ||sum_i E_i' lambda_i||_inf.
double check_null_multiplier(const std::vector<Eigen::VectorXd>& lambda,
                             const SelectionMap& maps);

/// The two-block splitting of the consensus problem: f = sum of constrained
/// agent blocks, g = 0, A = I, B = -[E_1; ...; E_M], c = 0.
SplitProblem build_split(const NetworkProblem& np);

}  // namespace altmin
