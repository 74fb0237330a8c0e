#include "altmin/dmpc.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "altmin/distributed.hpp"
#include "altmin/errors.hpp"
#include "altmin/rng.hpp"

namespace altmin {

bool controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd ctrb(n, n * B.cols());
  Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    ctrb.middleCols(t * B.cols(), B.cols()) = Ak * B;
    Ak = A * Ak;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
  const auto& sv = svd.singularValues();
  return sv.size() > 0 && sv(sv.size() - 1) > 1e-9 * sv(0);
}

Prediction build_prediction(const LtiAgent& agent, const MpcSpec& spec,
                            const std::vector<int>& neighbors) {
  const Eigen::Index nx = agent.A.rows();
  const Eigen::Index nu = agent.u_lo.size();
  const int N = spec.N;
  Prediction pr;
  pr.Phi.resize(N * nx, nx);
  Eigen::MatrixXd Ak = agent.A;
  for (int t = 1; t <= N; ++t) {
    pr.Phi.middleRows((t - 1) * nx, nx) = Ak;
    if (t < N) Ak = agent.A * Ak;
  }
  pr.Gamma = Eigen::MatrixXd::Zero(N * nx, N * nu * static_cast<Eigen::Index>(neighbors.size()));
  std::vector<Eigen::MatrixXd> pow(static_cast<std::size_t>(N));
  pow[0] = Eigen::MatrixXd::Identity(nx, nx);
  for (int t = 1; t < N; ++t) pow[t] = agent.A * pow[t - 1];
  for (std::size_t cj = 0; cj < neighbors.size(); ++cj) {
    auto it = agent.B.find(neighbors[cj]);
    if (it == agent.B.end())
      throw ConfigError("build_prediction: missing B block for neighbor " +
                        std::to_string(neighbors[cj]));
    const Eigen::MatrixXd& Bij = it->second;
    for (int t = 1; t <= N; ++t)
      for (int s = 0; s < t; ++s)
        pr.Gamma.block((t - 1) * nx, static_cast<Eigen::Index>(cj) * N * nu + s * nu, nx, nu) =
            pow[static_cast<std::size_t>(t - 1 - s)] * Bij;
  }
  return pr;
}

Eigen::VectorXd simulate_states(const LtiAgent& agent, const MpcSpec& spec,
                                const std::vector<int>& neighbors,
                                const Eigen::VectorXd& u_stack) {
  const Eigen::Index nx = agent.A.rows();
  const Eigen::Index nu = agent.u_lo.size();
  const int N = spec.N;
  Eigen::VectorXd x = agent.x0;
  Eigen::VectorXd out(N * nx);
  for (int t = 0; t < N; ++t) {
    Eigen::VectorXd xn = agent.A * x;
    for (std::size_t cj = 0; cj < neighbors.size(); ++cj)
      xn += agent.B.at(neighbors[cj]) *
            u_stack.segment(static_cast<Eigen::Index>(cj) * N * nu + t * nu, nu);
    out.segment(t * nx, nx) = xn;
    x = xn;
  }
  return out;
}

CondenseResult condense(const std::vector<LtiAgent>& agents, const MpcSpec& spec,
                        const Network& net) {
  if (static_cast<int>(agents.size()) != net.M) throw ConfigError("condense: one agent per node");
  if (spec.N < 1) throw ConfigError("condense: horizon must be >= 1");
  if (!net.connected()) throw ConfigError("condense: network must be connected");
  const Eigen::Index nx = agents[0].A.rows();
  const Eigen::Index nu = agents[0].u_lo.size();
  const int N = spec.N;

  for (int i = 0; i < net.M; ++i) {
    const LtiAgent& a = agents[i];
    if (a.A.rows() != nx || a.u_lo.size() != nu || a.u_hi.size() != nu || a.x0.size() != nx)
      throw ConfigError("condense: inhomogeneous agent dimensions");
    if (!controllable(a.A, a.B.at(i)))
      throw ConfigError("condense: pair (A_" + std::to_string(i) + ", B_" + std::to_string(i) +
                        std::to_string(i) + ") is not controllable");
    for (int j : net.neighbors[i])
      if (!a.B.count(j))
        throw ConfigError("condense: agent " + std::to_string(i) + " lacks B block for neighbor " +
                          std::to_string(j));
  }

  // Qbar = blkdiag(Q, ..., Q, P) over predicted states x(1..N)
  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(N * nx, N * nx);
  for (int t = 0; t < N - 1; ++t) Qbar.block(t * nx, t * nx, nx, nx) = spec.Q;
  Qbar.block((N - 1) * nx, (N - 1) * nx, nx, nx) = spec.P;

  std::vector<AgentProblem> out;
  std::vector<bool> ridge(net.M, false);
  out.reserve(agents.size());
  for (int i = 0; i < net.M; ++i) {
    const auto& nb = net.neighbors[i];
    Prediction pr = build_prediction(agents[i], spec, nb);
    Eigen::MatrixXd H = pr.Gamma.transpose() * Qbar * pr.Gamma;
    // each copy of u_j carries R / |N_j|; summed over the network every
    // input cost is counted exactly once
    for (std::size_t cj = 0; cj < nb.size(); ++cj) {
      const double w = 1.0 / static_cast<double>(net.degree(nb[cj]));
      for (int t = 0; t < N; ++t)
        H.block(static_cast<Eigen::Index>(cj) * N * nu + t * nu,
                static_cast<Eigen::Index>(cj) * N * nu + t * nu, nu, nu) += w * spec.R;
    }
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    if (lmin < 1e-10) {
      H += 1e-8 * Eigen::MatrixXd::Identity(H.rows(), H.cols());
      ridge[i] = true;
    }
    Eigen::VectorXd h = pr.Gamma.transpose() * (Qbar * (pr.Phi * agents[i].x0));

    Eigen::VectorXd lo(N * nu * static_cast<Eigen::Index>(nb.size()));
    Eigen::VectorXd hi(lo.size());
    for (std::size_t cj = 0; cj < nb.size(); ++cj)
      for (int t = 0; t < N; ++t) {
        lo.segment(static_cast<Eigen::Index>(cj) * N * nu + t * nu, nu) = agents[nb[cj]].u_lo;
        hi.segment(static_cast<Eigen::Index>(cj) * N * nu + t * nu, nu) = agents[nb[cj]].u_hi;
      }
    out.push_back({QuadraticFn(std::move(H), std::move(h)), ConvexSet::box(std::move(lo), std::move(hi))});
  }

  std::vector<Eigen::Index> block_dims(static_cast<std::size_t>(net.M), N * nu);
  return {NetworkProblem(std::move(out), net, std::move(block_dims)), std::move(ridge)};
}

double activation_fraction(const NetworkProblem& np, const Eigen::VectorXd& u_star, double tol) {
  MonolithicQp qp = assemble_monolithic(np);
  Eigen::Index active = 0;
  for (Eigen::Index i = 0; i < u_star.size(); ++i)
    if (std::abs(u_star[i] - qp.lo[i]) <= tol || std::abs(u_star[i] - qp.hi[i]) <= tol) ++active;
  return static_cast<double>(active) / static_cast<double>(u_star.size());
}

namespace {

Network random_connected_network(int M, int deg_min, int deg_max, Rng& rng) {
  if (deg_min < 1 || deg_max < deg_min) throw ConfigError("generator: bad neighbor count range");
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degree(static_cast<std::size_t>(M), 0);
  std::vector<int> perm(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = M - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);

  // random attachment tree, preferring nodes below the degree cap
  for (int idx = 1; idx < M; ++idx) {
    std::vector<int> candidates;
    for (int t = 0; t < idx; ++t)
      if (degree[static_cast<std::size_t>(perm[t])] < deg_max) candidates.push_back(perm[t]);
    const int j = perm[idx];
    const int i = candidates.empty() ? perm[rng.uniform_int(0, idx - 1)]
                                     : candidates[static_cast<std::size_t>(
                                           rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
    edges.emplace_back(i, j);
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }
  // extra edges while respecting the cap
  const int extra = M / 4;
  for (int t = 0; t < extra; ++t) {
    const int i = rng.uniform_int(0, M - 1), j = rng.uniform_int(0, M - 1);
    if (i == j || degree[static_cast<std::size_t>(i)] >= deg_max ||
        degree[static_cast<std::size_t>(j)] >= deg_max)
      continue;
    bool dup = false;
    for (auto& e : edges)
      if ((e.first == i && e.second == j) || (e.first == j && e.second == i)) dup = true;
    if (dup) continue;
    edges.emplace_back(i, j);
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }
  // enforce the minimum degree where possible
  for (int i = 0; i < M && deg_min > 1; ++i) {
    int guard = 0;
    while (degree[static_cast<std::size_t>(i)] < deg_min && guard++ < 4 * M) {
      const int j = rng.uniform_int(0, M - 1);
      if (j == i || degree[static_cast<std::size_t>(j)] >= deg_max) continue;
      bool dup = false;
      for (auto& e : edges)
        if ((e.first == i && e.second == j) || (e.first == j && e.second == i)) dup = true;
      if (dup) continue;
      edges.emplace_back(i, j);
      ++degree[static_cast<std::size_t>(i)];
      ++degree[static_cast<std::size_t>(j)];
    }
  }
  Network net = Network::from_edges(M, edges);
  if (!net.connected()) throw NumericalError("generator: produced a disconnected network");
  return net;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

double spectral_radius(const Eigen::MatrixXd& A) {
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

double impulse_gain(const Eigen::MatrixXd& A, int N) {
  double gain = 0.0;
  Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int t = 0; t < N; ++t) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ak);
    gain += svd.singularValues()(0);
    Ak = A * Ak;
  }
  return gain;
}

double top_singular(const Eigen::MatrixXd& B) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues()(0);
}

std::vector<LtiAgent> random_dynamics(const GeneratorParams& gp, const Network& net, Rng& rng,
                                      double xbar_scale) {
  std::vector<LtiAgent> agents(static_cast<std::size_t>(gp.M));
  for (int i = 0; i < gp.M; ++i) {
    LtiAgent& a = agents[static_cast<std::size_t>(i)];
    double gain = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < gp.resample_budget && !ok; ++attempt) {
      a.A = random_matrix(gp.nx, gp.nx, rng);
      a.A *= rng.uniform(gp.rho_min, gp.rho_max) / spectral_radius(a.A);
      gain = impulse_gain(a.A, gp.N);
      Eigen::MatrixXd Bii = random_matrix(gp.nx, gp.nu, rng);
      Bii *= gp.b_gain / (top_singular(Bii) * gain);
      a.B.clear();
      a.B[i] = Bii;
      ok = controllable(a.A, Bii);
    }
    if (!ok) throw NumericalError("generator: controllability resampling budget exhausted");
    for (int j : net.neighbors[i]) {
      if (j == i) continue;
      Eigen::MatrixXd Bij = random_matrix(gp.nx, gp.nu, rng);
      Bij *= gp.b_gain / (top_singular(Bij) * gain);
      a.B[j] = Bij;
    }
    a.x0 = Eigen::VectorXd(gp.nx);
    for (Eigen::Index t = 0; t < gp.nx; ++t) a.x0[t] = rng.normal();
    a.x0 *= xbar_scale;
    a.u_lo = Eigen::VectorXd::Constant(gp.nu, gp.box_lo);
    a.u_hi = Eigen::VectorXd::Constant(gp.nu, gp.box_hi);
  }
  return agents;
}

}  // namespace

GeneratedInstance generate_random_instance(const GeneratorParams& gp) {
  if (gp.M < 1) throw ConfigError("generator: M must be >= 1");
  if (!(gp.box_lo <= gp.box_hi)) throw ConfigError("generator: box bounds inverted");
  if (gp.rho_max > 1.1 + 1e-12) throw ConfigError("generator: spectral radius cap is 1.1");

  GeneratedInstance out;
  out.params = gp;
  out.spec.N = gp.N;
  out.spec.Q = Eigen::MatrixXd::Identity(gp.nx, gp.nx);
  out.spec.R = Eigen::MatrixXd::Identity(gp.nu, gp.nu);
  out.spec.P = Eigen::MatrixXd::Identity(gp.nx, gp.nx);

  Rng rng(gp.seed);
  out.net = gp.M == 1 ? Network::from_edges(1, {})
                      : random_connected_network(gp.M, gp.deg_min, gp.deg_max, rng);
  // base dynamics at unit scale; the activation scale only multiplies x0
  std::vector<LtiAgent> base = random_dynamics(gp, out.net, rng, 1.0);

  auto with_scale = [&](double s) {
    std::vector<LtiAgent> scaled = base;
    for (auto& a : scaled) a.x0 *= s;
    return condense(scaled, out.spec, out.net);
  };

  double scale = gp.activation_scale;
  if (gp.activation_target > 0) {
    // activation grows with the initial-state scale; bisect on it
    double lo = 1e-3, hi = 1.0;
    auto frac_at = [&](double s) {
      CondenseResult c = with_scale(s);
      return activation_fraction(c.problem, monolithic_solve(c.problem));
    };
    int guard = 0;
    while (frac_at(hi) < gp.activation_target && guard++ < 24) hi *= 2.0;
    if (guard > 24) throw NumericalError("generator: activation target unreachable");
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (frac_at(mid) >= gp.activation_target ? hi : lo) = mid;
      if (hi - lo < 1e-3 * hi) break;
    }
    scale = hi;
  }

  out.condensed = with_scale(scale);
  out.activation_scale_used = scale;
  for (auto& a : base) a.x0 *= scale;
  out.dynamics = std::move(base);
  out.achieved_activation =
      activation_fraction(out.condensed.problem, monolithic_solve(out.condensed.problem));
  return out;
}

}  // namespace altmin
