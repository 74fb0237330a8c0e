#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "altmin/objective.hpp"
#include "altmin/schedule.hpp"

namespace altmin {

/// Composite objective Phi = phi + psi: smooth phi with a gradient oracle
/// and known constants, proximable psi.
struct Composite {
  std::function<double(const Eigen::VectorXd&)> phi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_phi;
  double lipschitz = 0.0;  // L(grad phi)
  double modulus = 0.0;    // sigma_phi, 0 when merely convex
  ProxFn psi;
};

Composite make_quadratic_composite(QuadraticFn phi, ProxFn psi);

/// Per-iteration record of an inexact PGM/APGM run.
struct PgmTrace {
  std::vector<Eigen::VectorXd> w;       // w[0] = start, w[k] = iterate k
  std::vector<Eigen::VectorXd> w_avg;   // running average (1/k) sum w[p], k >= 1
  std::vector<double> obj;              // Phi(w[k]), k >= 1
  std::vector<double> obj_avg;          // Phi(w_avg[k]), k >= 1
  std::vector<double> e_norm;           // injected gradient-error norms
  std::vector<double> eps;              // achieved prox-error bounds
  double tau = 0.0;
  int K = 0;
};

struct PgmOptions {
  double tau = -1.0;  // <= 0: 0.99 / L
  int K = 100;
  ErrorSchedule e_sched = ErrorSchedule::zero();
  ErrorSchedule eps_sched = ErrorSchedule::zero();
  std::uint64_t seed = 0;
  bool feasible_only = true;
  bool record_objectives = true;
  /// Overrides for matched-error experiments: e_override(k) returns the
  /// realized gradient error; prox_override(k, v) the inexact prox point
  /// together with the epsilon to record.
  std::function<Eigen::VectorXd(int)> e_override;
  std::function<std::pair<Eigen::VectorXd, double>(int, const Eigen::VectorXd&)> prox_override;
};

/// Inexact proximal-gradient method:
///   w^k = prox_{tau psi, eps^k}(w^{k-1} - tau (grad phi(w^{k-1}) + e^k)).
PgmTrace run_inexact_pgm(const Composite& f, const Eigen::VectorXd& w0, const PgmOptions& opts);

/// Accelerated variant with momentum (k-1)/(k+2) between prox steps.
PgmTrace run_inexact_apgm(const Composite& f, const Eigen::VectorXd& w0, const PgmOptions& opts);

/// Reference optimum: exact APGM for k_ref iterations.
struct PgmReference {
  Eigen::VectorXd w_star;
  double phi_star = 0.0;
};
PgmReference pgm_reference(const Composite& f, const Eigen::VectorXd& w0, int k_ref);

/// Averaged-iterate bound for convex phi:
///   L/(2k) (dist0 + 2 Gamma^k + sqrt(2 Lambda^k))^2,
///   Gamma^k = sum_p (||e^p||/L + sqrt(2 eps^p / L)),  Lambda^k = sum_p eps^p/L.
double pgm_bound_convex(int k, double L, double dist0, std::span<const double> e_norms,
                        std::span<const double> eps_vals);

/// Last-iterate distance bound for strongly convex phi:
///   (1-gamma)^k (dist0 + Gamma^k), gamma = sigma/L,
///   Gamma^k = sum_p (1-gamma)^{-p} (||e^p||/L + sqrt(2/L) sqrt(eps^p)).
double pgm_bound_strongly_convex(int k, double L, double sigma_phi, double dist0,
                                 std::span<const double> e_norms,
                                 std::span<const double> eps_vals);

/// Accelerated bound: 2L/(k+1)^2 (dist0 + 2 Gamma^k + sqrt(2 Lambda^k))^2
/// with p-weighted Gamma and p^2-weighted Lambda.
double apgm_bound(int k, double L, double dist0, std::span<const double> e_norms,
                  std::span<const double> eps_vals);

}  // namespace altmin
