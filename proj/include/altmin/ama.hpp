#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "altmin/schedule.hpp"
#include "altmin/split_problem.hpp"

namespace altmin {

/// Per-iteration record of an inexact AMA/FAMA run. Index k starts at 1;
/// lambda[0] is the start.
struct AmaTrace {
  std::vector<Eigen::VectorXd> lambda;       // k = 0..K
  std::vector<Eigen::VectorXd> lambda_hat;   // FAMA only, k = 0..K
  std::vector<Eigen::VectorXd> x_tilde;      // k = 1..K
  std::vector<Eigen::VectorXd> z_tilde;      // k = 1..K
  std::vector<double> delta_norm, a_delta_norm;
  std::vector<double> theta_norm, b_theta_norm;
  std::vector<double> eps_equiv;             // tau^2 L(psi)||B theta|| + tau^2/2 ||B theta||^2
  std::vector<DualValue> dual_last, dual_avg;
  std::vector<Eigen::VectorXd> delta_vec, theta_vec;  // only when recorded
  double tau = 0.0;
  int K = 0;
  bool momentum = false;
  std::vector<Eigen::VectorXd> lambda_avg;   // running averages, k = 1..K
};

struct AmaOptions {
  double tau = -1.0;  // <= 0: 0.99 * sigma_f / rho(A)
  int K = 100;
  ErrorSchedule delta_sched = ErrorSchedule::zero();
  ErrorSchedule theta_sched = ErrorSchedule::zero();
  std::uint64_t seed = 0;
  bool feasible_only = true;       // re-project x errors into the block sets
  bool compute_dual = false;
  double inner_tol = 1e-10;
  double L_psi = 0.0;              // used for the recorded eps mapping
  bool record_error_vectors = false;
  bool record_iterates = true;
  /// Matched-error runs: realized delta^k / theta^k for k = 1..K.
  const std::vector<Eigen::VectorXd>* delta_override = nullptr;
  const std::vector<Eigen::VectorXd>* theta_override = nullptr;
};

/// Inexact AMA: x-step and augmented z-step solved exactly then perturbed
/// by scheduled errors; exact multiplier update.
AmaTrace run_inexact_ama(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                         const AmaOptions& opts);

/// Inexact FAMA: AMA with momentum (k-1)/(k+2) on the multipliers.
AmaTrace run_inexact_fama(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                          const AmaOptions& opts);

/// Runs inexact AMA (or FAMA) and the matching inexact (A)PGM on the dual
/// with identical realized errors; returns max_k ||lambda^k - w^k||.
double verify_dual_equivalence(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                               double tau, int K, const ErrorSchedule& delta_sched,
                               const ErrorSchedule& theta_sched, std::uint64_t seed,
                               bool accelerated = false);

// --- complexity-bound calculators -----------------------------------------
// All bound calculators consume the *measured* per-iteration norms
// ||A delta^p|| and ||B theta^p|| recorded in the trace.

/// Averaged-multiplier dual-gap bound:
///   L/(2k) (dist0 + 2 Gamma^k + sqrt(2 Lambda^k))^2
///   Gamma^k = sum (||A d^p||/L + tau sqrt((2 L_psi ||B t^p|| + ||B t^p||^2)/L))
///   Lambda^k = sum tau^2 (2 L_psi ||B t^p|| + ||B t^p||^2) / (2 L)
double ama_dual_bound(int k, double L, double dist0, double tau, double L_psi,
                      std::span<const double> a_delta_norms,
                      std::span<const double> b_theta_norms);

/// Linear-rate multiplier bound for quadratic f and full-row-rank A:
///   (1-gamma)^k (dist0 + Gamma^k), gamma = lmin(A H^-1 A')/lmax(A H^-1 A'),
///   Gamma^k = sum (1-g)^{-p} (||A d^p||/L + tau sqrt((L_psi ||B t^p|| + ||B t^p||^2)/L)).
double ama_linear_bound(int k, const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, double tau,
                        double L_psi, double dist0, std::span<const double> a_delta_norms,
                        std::span<const double> b_theta_norms);
/// Same with precomputed gamma and L = lmax(A H^-1 A').
double ama_linear_bound(int k, double gamma, double L, double tau, double L_psi, double dist0,
                        std::span<const double> a_delta_norms,
                        std::span<const double> b_theta_norms);

/// Accelerated dual-gap bound (p- and p^2-weighted sums).
double fama_bound(int k, double L, double dist0, double tau, double L_psi,
                  std::span<const double> a_delta_norms,
                  std::span<const double> b_theta_norms);

/// Bounded-error neighborhood bound:
///   (1-gamma)^k dist0 + Delta,
///   Delta = (1/gamma)(||A|| db/L + tau sqrt((L_psi ||B|| tb + ||B||^2 tb^2)/L)).
double ama_bounded_error_bound(int k, double gamma, double L, double dist0, double tau,
                               double L_psi, double norm_A, double norm_B, double delta_bar,
                               double theta_bar);

struct DivergingBound {
  double value = 0.0;
  bool diverges_in_k = false;
};

/// Bounded-error accelerated bound (2L dist0/(k+1) + k Delta)^2 with
///   Delta = ||A|| db/L + (3 tau/2) sqrt((2 L_psi ||B|| tb + ||B|| tb^2)/L);
/// flagged as divergent in k.
DivergingBound fama_bounded_error_bound(int k, double L, double dist0, double tau, double L_psi,
                                        double norm_A, double norm_B, double delta_bar,
                                        double theta_bar);

// --- sufficient-condition classifier ---------------------------------------

enum class Algorithm { kAma, kFama };

struct ScheduleVerdict {
  enum class Convergence { kYes, kYesToNeighborhood, kNotGuaranteed };
  Convergence converges = Convergence::kNotGuaranteed;
  std::string rationale;
};

/// Pure function of (schedule families, algorithm, assumption set): decides
/// whether the known sufficient conditions guarantee convergence.
ScheduleVerdict classify_schedule(const ErrorSchedule& delta_sched,
                                  const ErrorSchedule& theta_sched, Algorithm algorithm,
                                  bool quadratic_case, bool L_psi_finite);

// --- series utility ---------------------------------------------------------

struct SeriesBound {
  double value = 0.0;        // S^k = alpha^k sum_{p=1..k} alpha^{-p}/p
  double upper_bound = 0.0;  // +inf where the closed form provides no bound
};

/// Stable evaluation of the geometric-harmonic series together with its
/// closed-form upper bound (switch point k' where alpha^{-p}/p turns
/// increasing; logarithmic integral terms).
SeriesBound geometric_harmonic_series(double alpha, int k);

/// Smallest positive integer k' with alpha^{-k'}/k' < alpha^{-(k'+1)}/(k'+1).
int series_switch_index(double alpha);

}  // namespace altmin
