#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "altmin/local_solver.hpp"
#include "altmin/network.hpp"
#include "altmin/schedule.hpp"
#include "altmin/split_problem.hpp"

namespace altmin {

/// One local solve's outcome plus optional certification diagnostics.
struct LocalSolve {
  Eigen::VectorXd z;
  int inner_iterations = 0;
  int certified_J = -1;  // certificate value when a certified port produced it
  int exact_J = -1;      // exact minimal count when requested
  double alpha_k = std::numeric_limits<double>::quiet_NaN();
  double beta_k = std::numeric_limits<double>::quiet_NaN();
};

/// Pluggable local solver: given (agent, multiplier parameter, outer
/// iteration, warm start) return a feasible approximate minimizer of the
/// local problem.
class LocalSolverPort {
 public:
  virtual ~LocalSolverPort() = default;
  /// Called once per outer iteration before the agent-parallel solves.
  virtual void begin_iteration(int /*k*/) {}
  virtual LocalSolve solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                           const Eigen::VectorXd& warm) = 0;
};

/// Exact oracle port (box-QP / projected gradient to machine tolerance).
class ExactLocalSolver : public LocalSolverPort {
 public:
  explicit ExactLocalSolver(const NetworkProblem& np) : np_(&np) {}
  LocalSolve solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                   const Eigen::VectorXd& warm) override;

 private:
  const NetworkProblem* np_;
};

/// Solves exactly, then perturbs by a slice of one global random direction
/// scaled to the scheduled magnitude, re-projecting into C_i so the iterate
/// stays feasible. The same global direction reproduces centralized runs.
class SyntheticErrorLocalSolver : public LocalSolverPort {
 public:
  SyntheticErrorLocalSolver(const NetworkProblem& np, ErrorSchedule delta_sched,
                            std::uint64_t seed, bool record_history = false);
  void begin_iteration(int k) override;
  LocalSolve solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                   const Eigen::VectorXd& warm) override;
  /// Realized per-agent errors of the last iteration (after re-projection).
  const std::vector<Eigen::VectorXd>& last_realized() const { return realized_; }
  /// Realized stacked error per iteration (record_history only).
  const std::vector<Eigen::VectorXd>& history() const { return history_; }

 private:
  const NetworkProblem* np_;
  ErrorSchedule sched_;
  Rng rng_;
  Eigen::VectorXd direction_;
  double magnitude_ = 0.0;
  bool record_history_ = false;
  std::vector<Eigen::VectorXd> realized_;
  std::vector<Eigen::VectorXd> history_;
};

/// Inner projected-gradient solver sized by the online iteration
/// certificate; keeps per-agent warm starts and multiplier increments.
class CertifiedLocalSolver : public LocalSolverPort {
 public:
  struct Options {
    DecreaseFunction alpha = DecreaseFunction::power(1.0, 1.0);
    bool auto_alpha0 = true;   // alpha0 = max_i ||z*_i(0)|| (1 + 1e-9)
    double tau_factor = 0.99;  // tau_i = tau_factor / L_i
    bool with_exact_count = false;
  };
  CertifiedLocalSolver(const NetworkProblem& np, const Options& opts);
  void begin_iteration(int k) override;
  LocalSolve solve(int agent, const Eigen::VectorXd& lambda_i, int k,
                   const Eigen::VectorXd& warm) override;
  double alpha0() const { return alpha_.alpha0(); }
  const DecreaseFunction& alpha() const { return alpha_; }

 private:
  const NetworkProblem* np_;
  Options opts_;
  DecreaseFunction alpha_;
  std::vector<CertState> state_;
  std::vector<double> tau_i_;
};

/// Read-access audit hook for the two neighbor-exchange phases.
struct ExchangeAudit {
  std::function<void(int reader, int owner)> on_read;
};

struct DistOptions {
  double tau = -1.0;  // <= 0: 0.99 * min_i sigma_i
  int K = 100;
  int threads = 1;
  bool momentum = false;  // FAMA variant
  bool compute_dual = false;
  double inner_tol = 1e-10;
  /// Measure ||delta_i^k|| = ||z~ - z*(param)|| against the exact oracle.
  bool record_delta_measured = false;
  double feasibility_tol = 1e-9;
  ExchangeAudit* audit = nullptr;
};

struct DistTrace {
  // stacked multipliers, k = 0..K (agent blocks in ascending order)
  std::vector<Eigen::VectorXd> lambda_stacked;
  std::vector<Eigen::VectorXd> v;                   // consensus iterate, k = 1..K
  std::vector<Eigen::VectorXd> z_stacked;           // local solutions, k = 1..K
  std::vector<double> et_lambda_inf;                // ||E' lambda^k||_inf, k = 1..K
  std::vector<double> delta_norm;                   // global injected/measured error norm
  std::vector<std::vector<double>> delta_measured;  // per agent, when recorded
  std::vector<std::vector<int>> J_certified;        // per agent, certified ports
  std::vector<std::vector<int>> J_exact;            // per agent, when requested
  std::vector<DualValue> dual_last, dual_avg;
  std::vector<double> beta_max;                     // max_i beta_i^k (certified ports)
  std::vector<double> alpha_k;                      // decrease function values
  double tau = 0.0;
  int K = 0;
  bool momentum = false;

  /// Per-agent view of lambda^k.
  std::vector<Eigen::VectorXd> lambda_agents(const SelectionMap& maps, int k) const;
};

/// Distributed inexact AMA (momentum=false) / FAMA (momentum=true):
/// agent-parallel local solves, neighbor exchange, consensus, neighbor
/// exchange, multiplier update. Multipliers start at zero.
DistTrace run_distributed_iama(const NetworkProblem& np, LocalSolverPort& local,
                               const DistOptions& opts);
DistTrace run_distributed_ifama(const NetworkProblem& np, LocalSolverPort& local,
                                const DistOptions& opts);

// --- distributed bound calculators -----------------------------------------

enum class DistBoundVariant { kAveragedGap, kLinearRate, kAcceleratedGap, kAcceleratedGapNoM };

struct DistBoundConstants {
  double L = 0.0;      // sigma_f^{-1}
  double dist0 = 0.0;  // ||lambda^0 - lambda*||
  double gamma = 0.0;  // lmin(H)/lmax(H), quadratic blocks
  int M = 0;
};

/// Distributed bounds on measured global error norms (theta = 0,
/// L(psi) = 0 along the trajectory):
///   kAveragedGap:     L/(2k) (dist0 + 2 sum ||d^p||/L)^2
///   kLinearRate:      (1-g)^{k+1}(dist0 + sum_{p=0..k} (1-g)^{-p-1}||d^p||/L), d^0 = 0
///   kAcceleratedGap:  2L/(k+1)^2 (dist0 + 2 M sum p ||d^p||/L)^2
///   kAcceleratedGapNoM: the same without the M factor (kept for comparison;
///   the M multiplier on the error sum looks stronger than the generic
///   accelerated bound warrants).
double distributed_bound(int k, DistBoundVariant variant, const DistBoundConstants& c,
                         std::span<const double> delta_norms);

// --- references --------------------------------------------------------------

struct ReferenceSolution {
  Eigen::VectorXd u_star;                  // high-accuracy monolithic solve
  std::vector<Eigen::VectorXd> lambda_star;  // exact FAMA limit, per agent
  Eigen::VectorXd lambda_star_stacked;
  double D_star = 0.0;
  int K_ref = 0;
};

/// Monolithic box-QP assembly sum_i f_i(E_i v) over the global box.
struct MonolithicQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd h, lo, hi;
};
MonolithicQp assemble_monolithic(const NetworkProblem& np);
Eigen::VectorXd monolithic_solve(const NetworkProblem& np, double tol = 1e-13);

/// u* from the monolithic solve; lambda*, D* from an exact FAMA run of
/// K_ref iterations.
ReferenceSolution compute_reference(const NetworkProblem& np, int K_ref, double tau = -1.0);

}  // namespace altmin
