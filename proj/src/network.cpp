#include "altmin/network.hpp"

#include <algorithm>
#include <queue>

#include "altmin/box_qp.hpp"
#include "altmin/errors.hpp"

namespace altmin {

Network Network::from_edges(int M, const std::vector<std::pair<int, int>>& edges) {
  if (M < 1) throw ConfigError("Network: M must be >= 1");
  Network net;
  net.M = M;
  net.neighbors.assign(M, {});
  for (int i = 0; i < M; ++i) net.neighbors[i].push_back(i);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= M || j >= M) throw ConfigError("Network: edge index out of range");
    if (i == j) continue;
    net.neighbors[i].push_back(j);
    net.neighbors[j].push_back(i);
  }
  for (auto& nb : net.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return net;
}

bool Network::connected() const {
  if (M == 0) return false;
  std::vector<bool> seen(M, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (int j : neighbors[i])
      if (!seen[j]) {
        seen[j] = true;
        ++count;
        q.push(j);
      }
  }
  return count == M;
}

SelectionMap::SelectionMap(Network net, std::vector<Eigen::Index> block_dims)
    : net_(std::move(net)), block_dims_(std::move(block_dims)) {
  if (static_cast<int>(block_dims_.size()) != net_.M)
    throw ConfigError("SelectionMap: one block dimension per agent required");
  v_offsets_.resize(net_.M);
  z_dims_.resize(net_.M);
  z_offsets_.resize(net_.M);
  for (int i = 0; i < net_.M; ++i) {
    v_offsets_[i] = global_dim_;
    global_dim_ += block_dims_[i];
  }
  for (int i = 0; i < net_.M; ++i) {
    z_offsets_[i] = total_z_dim_;
    Eigen::Index d = 0;
    for (int j : net_.neighbors[i]) d += block_dims_[j];
    z_dims_[i] = d;
    total_z_dim_ += d;
  }
}

Eigen::VectorXd SelectionMap::apply_E(int i, const Eigen::VectorXd& v) const {
  Eigen::VectorXd z(z_dims_[i]);
  Eigen::Index off = 0;
  for (int j : net_.neighbors[i]) {
    z.segment(off, block_dims_[j]) = v.segment(v_offsets_[j], block_dims_[j]);
    off += block_dims_[j];
  }
  return z;
}

Eigen::Index SelectionMap::copy_offset(int j, int i) const {
  Eigen::Index off = 0;
  for (int n : net_.neighbors[j]) {
    if (n == i) return off;
    off += block_dims_[n];
  }
  throw ConfigError("SelectionMap: agent " + std::to_string(i) + " is not a neighbor of " +
                    std::to_string(j));
}

Eigen::VectorXd SelectionMap::apply_F(int j, int i, const Eigen::VectorXd& z_j) const {
  return z_j.segment(copy_offset(j, i), block_dims_[i]);
}

Eigen::SparseMatrix<double> SelectionMap::stacked_E() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(total_z_dim_));
  for (int i = 0; i < net_.M; ++i) {
    Eigen::Index row = z_offsets_[i];
    for (int j : net_.neighbors[i]) {
      for (Eigen::Index t = 0; t < block_dims_[j]; ++t)
        trip.emplace_back(row + t, v_offsets_[j] + t, 1.0);
      row += block_dims_[j];
    }
  }
  Eigen::SparseMatrix<double> E(total_z_dim_, global_dim_);
  E.setFromTriplets(trip.begin(), trip.end());
  return E;
}

Eigen::VectorXd SelectionMap::Et_apply(const std::vector<Eigen::VectorXd>& per_agent) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(global_dim_);
  for (int i = 0; i < net_.M; ++i) {
    Eigen::Index off = 0;
    for (int j : net_.neighbors[i]) {
      acc.segment(v_offsets_[j], block_dims_[j]) += per_agent[i].segment(off, block_dims_[j]);
      off += block_dims_[j];
    }
  }
  return acc;
}

NetworkProblem::NetworkProblem(std::vector<AgentProblem> a, Network n,
                               std::vector<Eigen::Index> block_dims)
    : agents(std::move(a)), net(std::move(n)), maps(net, std::move(block_dims)) {
  if (static_cast<int>(agents.size()) != net.M)
    throw ConfigError("NetworkProblem: one agent per node required");
  for (int i = 0; i < net.M; ++i) {
    if (agents[i].f.dim() != maps.z_dim(i))
      throw ConfigError("NetworkProblem: agent " + std::to_string(i) +
                        " objective dimension does not match its neighborhood stack");
    if (agents[i].set.dim() != maps.z_dim(i))
      throw ConfigError("NetworkProblem: agent " + std::to_string(i) + " set dimension mismatch");
  }
}

double NetworkProblem::sigma_f() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& a : agents) s = std::min(s, a.sigma());
  return s;
}

double NetworkProblem::gamma_quadratic() const {
  double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
  for (const auto& a : agents) {
    lmin = std::min(lmin, a.f.modulus());
    lmax = std::max(lmax, a.f.lipschitz());
  }
  return lmin / lmax;
}

Eigen::VectorXd agent_exact_solve(const AgentProblem& a, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd* warm, double tol) {
  if (a.set.is_box()) {
    BoxQpOptions opts;
    opts.tol = tol;
    opts.warm = warm;
    return solve_box_qp(a.f, lambda, a.set.lower(), a.set.upper(), opts).z;
  }
  const double step = 1.0 / a.f.lipschitz();
  Eigen::VectorXd z = warm ? a.set.project(*warm) : a.set.project(Eigen::VectorXd::Zero(a.f.dim()));
  const double scale = 1.0 + lambda.lpNorm<Eigen::Infinity>() + a.f.h().lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 200000; ++it) {
    Eigen::VectorXd zn = a.set.project(z - step * (a.f.gradient(z) - lambda));
    if ((zn - z).lpNorm<Eigen::Infinity>() <= tol * scale) return zn;
    z = zn;
  }
  throw NumericalError("agent_exact_solve: projected gradient did not reach tolerance");
}

Eigen::VectorXd NetworkProblem::local_solve(int i, const Eigen::VectorXd& lambda_i,
                                            const Eigen::VectorXd* warm, double tol) const {
  return agent_exact_solve(agents[i], lambda_i, warm, tol);
}

Eigen::VectorXd consensus(const std::vector<Eigen::VectorXd>& ztilde, const SelectionMap& maps) {
  const Network& net = maps.network();
  if (static_cast<int>(ztilde.size()) != net.M)
    throw ConfigError("consensus: one stack per agent required");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(maps.global_dim());
  for (int i = 0; i < net.M; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(maps.block_dim(i));
    for (int j : net.neighbors[i])  // ascending order fixes the float reduction
      acc += ztilde[j].segment(maps.copy_offset(j, i), maps.block_dim(i));
    v.segment(maps.v_offset(i), maps.block_dim(i)) = acc / static_cast<double>(net.degree(i));
  }
  return v;
}

double check_null_multiplier(const std::vector<Eigen::VectorXd>& lambda,
                             const SelectionMap& maps) {
  return maps.Et_apply(lambda).lpNorm<Eigen::Infinity>();
}

SplitProblem build_split(const NetworkProblem& np) {
  if (!np.net.connected()) throw ConfigError("build_split: network must be connected");
  std::vector<FBlock> blocks;
  blocks.reserve(np.agents.size());
  for (const auto& a : np.agents) blocks.push_back({a.f, a.set});

  const Eigen::Index nz = np.maps.total_z_dim();
  Eigen::SparseMatrix<double> A(nz, nz);
  A.setIdentity();
  Eigen::SparseMatrix<double> B = Eigen::SparseMatrix<double>(-np.maps.stacked_E());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nz);
  return SplitProblem(std::move(blocks), ProxFn::zero(np.maps.global_dim()), std::move(A),
                      std::move(B), std::move(c));
}

}  // namespace altmin
