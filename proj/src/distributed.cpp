#include "altmin/distributed.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <thread>

#include "altmin/box_qp.hpp"
#include "altmin/errors.hpp"

namespace altmin {
namespace {

void parallel_over_agents(int M, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || M <= 1) {
    for (int i = 0; i < M; ++i) body(i);
    return;
  }
  const int n = std::min(threads, M);
  std::vector<std::thread> pool;
  pool.reserve(n);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < M; i = next.fetch_add(1)) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

LocalSolve ExactLocalSolver::solve(int agent, const Eigen::VectorXd& lambda_i, int,
                                   const Eigen::VectorXd& warm) {
  LocalSolve out;
  out.z = np_->local_solve(agent, lambda_i, &warm);
  return out;
}

SyntheticErrorLocalSolver::SyntheticErrorLocalSolver(const NetworkProblem& np,
                                                     ErrorSchedule delta_sched, std::uint64_t seed,
                                                     bool record_history)
    : np_(&np), sched_(delta_sched), rng_(seed), record_history_(record_history) {
  realized_.resize(np.M());
}

void SyntheticErrorLocalSolver::begin_iteration(int k) {
  magnitude_ = sched_(k);
  if (magnitude_ > 0) direction_ = rng_.unit_direction(np_->maps.total_z_dim());
  for (auto& r : realized_) r.resize(0);
  if (record_history_) {
    history_.resize(static_cast<std::size_t>(k));
    history_[static_cast<std::size_t>(k - 1)] = Eigen::VectorXd::Zero(np_->maps.total_z_dim());
  }
}

LocalSolve SyntheticErrorLocalSolver::solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                                            const Eigen::VectorXd& warm) {
  LocalSolve out;
  Eigen::VectorXd exact = np_->local_solve(agent, lambda_i, &warm);
  const Eigen::Index off = np_->maps.z_offset(agent);
  const Eigen::Index n = np_->maps.z_dim(agent);
  if (magnitude_ > 0) {
    Eigen::VectorXd pert = exact + magnitude_ * direction_.segment(off, n);
    out.z = np_->agents[agent].set.project(pert);  // stays primal feasible
    realized_[agent] = out.z - exact;
  } else {
    out.z = std::move(exact);
    realized_[agent] = Eigen::VectorXd::Zero(n);
  }
  if (record_history_)
    history_[static_cast<std::size_t>(k - 1)].segment(off, n) = realized_[agent];
  return out;
}

CertifiedLocalSolver::CertifiedLocalSolver(const NetworkProblem& np, const Options& opts)
    : np_(&np), opts_(opts), alpha_(opts.alpha) {
  const int M = np.M();
  state_.resize(M);
  tau_i_.resize(M);
  double alpha0 = alpha_.alpha0();
  double max_norm = 0.0;
  for (int i = 0; i < M; ++i) {
    const AgentProblem& a = np.agents[i];
    state_[i].gamma = a.sigma() / a.lipschitz();
    state_[i].Lz = 1.0 / a.sigma();
    state_[i].warm = Eigen::VectorXd::Zero(a.f.dim());
    state_[i].prev_param = Eigen::VectorXd::Zero(a.f.dim());
    tau_i_[i] = opts.tau_factor / a.lipschitz();
    if (opts.auto_alpha0) {
      Eigen::VectorXd z1 = agent_exact_solve(a, Eigen::VectorXd::Zero(a.f.dim()));
      max_norm = std::max(max_norm, z1.norm());
    }
  }
  if (opts.auto_alpha0) alpha0 = std::max(max_norm * (1.0 + 1e-9), 1e-12);
  alpha_ = alpha_.with_alpha0(alpha0);
}

void CertifiedLocalSolver::begin_iteration(int) {}

LocalSolve CertifiedLocalSolver::solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                                       const Eigen::VectorXd& warm) {
  CertState& st = state_[agent];
  st.beta = (lambda_i - st.prev_param).norm();
  const double a_k = alpha_.value(k), a_prev = alpha_.value(k - 1);
  const int J = certify_iterations(a_k, a_prev, st.beta, st.gamma, st.Lz);

  LocalSolve out;
  out.z = local_pg(np_->agents[agent], lambda_i, warm, J, tau_i_[agent]);
  out.inner_iterations = J;
  out.certified_J = J;
  out.alpha_k = a_k;
  out.beta_k = st.beta;
  if (opts_.with_exact_count)
    out.exact_J = exact_min_iterations(np_->agents[agent], lambda_i, warm, a_k, tau_i_[agent]);
  st.prev_param = lambda_i;
  st.warm = out.z;
  return out;
}

std::vector<Eigen::VectorXd> DistTrace::lambda_agents(const SelectionMap& maps, int k) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(maps.network().M));
  for (int i = 0; i < maps.network().M; ++i)
    out.push_back(lambda_stacked[k].segment(maps.z_offset(i), maps.z_dim(i)));
  return out;
}

namespace {

DistTrace run_dist_impl(const NetworkProblem& np, LocalSolverPort& local, const DistOptions& opts,
                        bool momentum) {
  const int M = np.M();
  const SelectionMap& maps = np.maps;
  const double tau_max = np.sigma_f();
  const double tau = opts.tau > 0 ? opts.tau : 0.99 * tau_max;
  if (!(tau < tau_max))
    throw ConfigError("run_distributed: step size must satisfy tau < min_i sigma_i");

  // lazily built split problem for dual evaluations
  std::unique_ptr<SplitProblem> split;
  if (opts.compute_dual) split = std::make_unique<SplitProblem>(build_split(np));

  DistTrace tr;
  tr.tau = tau;
  tr.K = opts.K;
  tr.momentum = momentum;

  std::vector<Eigen::VectorXd> lambda(M), lambda_hat(M), z(M), z_new(M);
  std::vector<LocalSolve> solves(M);
  for (int i = 0; i < M; ++i) {
    lambda[i] = Eigen::VectorXd::Zero(maps.z_dim(i));
    lambda_hat[i] = lambda[i];
    z[i] = Eigen::VectorXd::Zero(maps.z_dim(i));
  }
  auto stack = [&](const std::vector<Eigen::VectorXd>& per_agent) {
    Eigen::VectorXd s(maps.total_z_dim());
    for (int i = 0; i < M; ++i) s.segment(maps.z_offset(i), maps.z_dim(i)) = per_agent[i];
    return s;
  };
  tr.lambda_stacked.push_back(stack(lambda));

  Eigen::VectorXd lambda_sum = Eigen::VectorXd::Zero(maps.total_z_dim());

  for (int k = 1; k <= opts.K; ++k) {
    local.begin_iteration(k);
    const std::vector<Eigen::VectorXd>& mult = momentum ? lambda_hat : lambda;

    // step 1: agent-parallel local solves
    parallel_over_agents(M, opts.threads, [&](int i) {
      solves[i] = local.solve(i, mult[i], k, z[i]);
      if (!np.agents[i].set.contains(solves[i].z, opts.feasibility_tol))
        throw NumericalError("distributed run: agent " + std::to_string(i) +
                             " returned an infeasible local solution at k=" + std::to_string(k));
      z_new[i] = solves[i].z;
    });

    // measure ||delta_i^k|| against the parameter the solves actually used,
    // before the multiplier update overwrites it
    std::vector<double> measured;
    if (opts.record_delta_measured) {
      measured.assign(M, 0.0);
      parallel_over_agents(M, opts.threads, [&](int i) {
        Eigen::VectorXd z_star = np.local_solve(i, mult[i], &z_new[i]);
        measured[i] = (z_new[i] - z_star).norm();
      });
    }

    // step 2/3: neighbor exchange + consensus (deterministic ascending order)
    Eigen::VectorXd v = Eigen::VectorXd::Zero(maps.global_dim());
    for (int i = 0; i < M; ++i) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(maps.block_dim(i));
      for (int j : np.net.neighbors[i]) {
        if (opts.audit && opts.audit->on_read) opts.audit->on_read(i, j);
        acc += z_new[j].segment(maps.copy_offset(j, i), maps.block_dim(i));
      }
      v.segment(maps.v_offset(i), maps.block_dim(i)) = acc / static_cast<double>(np.net.degree(i));
    }

    // step 4/5: second exchange + multiplier update
    for (int i = 0; i < M; ++i) {
      Eigen::VectorXd Ev(maps.z_dim(i));
      Eigen::Index off = 0;
      for (int j : np.net.neighbors[i]) {
        if (opts.audit && opts.audit->on_read) opts.audit->on_read(i, j);
        Ev.segment(off, maps.block_dim(j)) = v.segment(maps.v_offset(j), maps.block_dim(j));
        off += maps.block_dim(j);
      }
      Eigen::VectorXd next = mult[i] + tau * (Ev - z_new[i]);
      if (momentum) {
        const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
        lambda_hat[i] = next + beta * (next - lambda[i]);
      }
      lambda[i] = std::move(next);
    }
    z = z_new;

    // bookkeeping
    Eigen::VectorXd lam_stack = stack(lambda);
    lambda_sum += lam_stack;
    tr.lambda_stacked.push_back(lam_stack);
    tr.v.push_back(v);
    tr.z_stacked.push_back(stack(z));
    tr.et_lambda_inf.push_back(check_null_multiplier(lambda, maps));

    double delta_sq = 0.0;
    bool have_cert = false, have_exact = false;
    for (int i = 0; i < M; ++i) {
      if (solves[i].certified_J >= 0) have_cert = true;
      if (solves[i].exact_J >= 0) have_exact = true;
    }
    if (opts.record_delta_measured) {
      for (int i = 0; i < M; ++i) delta_sq += measured[i] * measured[i];
      tr.delta_measured.push_back(measured);
      tr.delta_norm.push_back(std::sqrt(delta_sq));
    } else {
      tr.delta_norm.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (have_cert) {
      std::vector<int> Js(M);
      double beta_max = 0.0, a_k = 0.0;
      for (int i = 0; i < M; ++i) {
        Js[i] = solves[i].certified_J;
        beta_max = std::max(beta_max, solves[i].beta_k);
        a_k = solves[i].alpha_k;
      }
      tr.J_certified.push_back(std::move(Js));
      tr.beta_max.push_back(beta_max);
      tr.alpha_k.push_back(a_k);
    }
    if (have_exact) {
      std::vector<int> Js(M);
      for (int i = 0; i < M; ++i) Js[i] = solves[i].exact_J;
      tr.J_exact.push_back(std::move(Js));
    }
    if (opts.compute_dual) {
      tr.dual_last.push_back(split->dual_value(lam_stack, opts.inner_tol));
      tr.dual_avg.push_back(split->dual_value(lambda_sum / k, opts.inner_tol));
    }
  }
  return tr;
}

}  // namespace

DistTrace run_distributed_iama(const NetworkProblem& np, LocalSolverPort& local,
                               const DistOptions& opts) {
  return run_dist_impl(np, local, opts, false);
}

DistTrace run_distributed_ifama(const NetworkProblem& np, LocalSolverPort& local,
                                const DistOptions& opts) {
  return run_dist_impl(np, local, opts, true);
}

double distributed_bound(int k, DistBoundVariant variant, const DistBoundConstants& c,
                         std::span<const double> delta_norms) {
  if (k < 1) throw ConfigError("distributed_bound: k must be >= 1");
  if (static_cast<int>(delta_norms.size()) < k)
    throw ConfigError("distributed_bound: error series shorter than k");
  switch (variant) {
    case DistBoundVariant::kAveragedGap: {
      double s = 0.0;
      for (int p = 1; p <= k; ++p) s += delta_norms[p - 1] / c.L;
      const double r = c.dist0 + 2.0 * s;
      return c.L / (2.0 * k) * r * r;
    }
    case DistBoundVariant::kLinearRate: {
      // (1-g)^{k+1} dist0 + sum_{p=0..k} (1-g)^{k-p} ||d^p||/L with d^0 = 0,
      // evaluated in the overflow-safe expanded form
      const double q = 1.0 - c.gamma;
      double bound = std::pow(q, k + 1) * c.dist0;
      for (int p = 1; p <= k; ++p)
        bound += (p == k ? 1.0 : std::pow(q, k - p)) * delta_norms[p - 1] / c.L;
      return bound;
    }
    case DistBoundVariant::kAcceleratedGap:
    case DistBoundVariant::kAcceleratedGapNoM: {
      double s = 0.0;
      for (int p = 1; p <= k; ++p) s += p * delta_norms[p - 1] / c.L;
      const double mult =
          variant == DistBoundVariant::kAcceleratedGap ? static_cast<double>(c.M) : 1.0;
      const double r = c.dist0 + 2.0 * mult * s;
      return 2.0 * c.L / ((k + 1.0) * (k + 1.0)) * r * r;
    }
  }
  return 0.0;
}

MonolithicQp assemble_monolithic(const NetworkProblem& np) {
  const SelectionMap& maps = np.maps;
  const Eigen::Index nv = maps.global_dim();
  MonolithicQp qp;
  qp.H = Eigen::MatrixXd::Zero(nv, nv);
  qp.h = Eigen::VectorXd::Zero(nv);
  qp.lo = Eigen::VectorXd::Constant(nv, -std::numeric_limits<double>::infinity());
  qp.hi = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
  for (int i = 0; i < np.M(); ++i) {
    const auto& nb = np.net.neighbors[i];
    std::vector<Eigen::Index> idx;
    for (int j : nb)
      for (Eigen::Index t = 0; t < maps.block_dim(j); ++t) idx.push_back(maps.v_offset(j) + t);
    const auto& H = np.agents[i].f.H();
    const auto& h = np.agents[i].f.h();
    for (std::size_t a = 0; a < idx.size(); ++a) {
      qp.h[idx[a]] += h[static_cast<Eigen::Index>(a)];
      for (std::size_t b = 0; b < idx.size(); ++b)
        qp.H(idx[a], idx[b]) += H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    if (np.agents[i].set.is_box()) {
      const auto& lo = np.agents[i].set.lower();
      const auto& hi = np.agents[i].set.upper();
      for (std::size_t a = 0; a < idx.size(); ++a) {
        qp.lo[idx[a]] = std::max(qp.lo[idx[a]], lo[static_cast<Eigen::Index>(a)]);
        qp.hi[idx[a]] = std::min(qp.hi[idx[a]], hi[static_cast<Eigen::Index>(a)]);
      }
    } else {
      throw OracleError("assemble_monolithic: non-box local sets are not supported");
    }
  }
  return qp;
}

Eigen::VectorXd monolithic_solve(const NetworkProblem& np, double tol) {
  MonolithicQp qp = assemble_monolithic(np);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.H, Eigen::EigenvaluesOnly);
  BoxQpOptions opts;
  opts.tol = tol;
  opts.max_pg = 200000;
  return solve_box_qp_raw(qp.H, eig.eigenvalues().maxCoeff(), qp.h, qp.lo, qp.hi, opts).z;
}

ReferenceSolution compute_reference(const NetworkProblem& np, int K_ref, double tau) {
  ReferenceSolution ref;
  ref.K_ref = K_ref;
  ref.u_star = monolithic_solve(np);

  ExactLocalSolver exact(np);
  DistOptions opts;
  opts.tau = tau;
  opts.K = K_ref;
  opts.momentum = true;
  DistTrace tr = run_distributed_ifama(np, exact, opts);
  ref.lambda_star_stacked = tr.lambda_stacked.back();
  ref.lambda_star = tr.lambda_agents(np.maps, K_ref);

  SplitProblem split = build_split(np);
  ref.D_star = split.dual_value(ref.lambda_star_stacked).value;
  return ref;
}

}  // namespace altmin
