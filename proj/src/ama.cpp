#include "altmin/ama.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "altmin/errors.hpp"
#include "altmin/rng.hpp"

namespace altmin {
namespace {

// Perturb the exact block solution by a random direction of the prescribed
// norm; when feasibility is required the perturbed point is re-projected
// into each block's set and the realized error re-measured.
Eigen::VectorXd inject_block_error(const SplitProblem& p, const Eigen::VectorXd& exact,
                                   double magnitude, bool feasible_only, Rng& rng) {
  if (magnitude <= 0) return exact;
  Eigen::VectorXd pert = exact + magnitude * rng.unit_direction(exact.size());
  if (feasible_only && p.f_constrained()) {
    for (int b = 0; b < p.num_blocks(); ++b) {
      const Eigen::Index off = p.block_offset(b), n = p.block(b).f.dim();
      pert.segment(off, n) = p.block(b).set.project(pert.segment(off, n));
    }
  }
  return pert;
}

AmaTrace run_ama_impl(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                      const AmaOptions& opts, bool momentum) {
  const double tau_max = p.step_size_bound();
  const double tau = opts.tau > 0 ? opts.tau : 0.99 * tau_max;
  if (!(tau < tau_max))
    throw ConfigError("run_inexact_ama: step size must satisfy tau < sigma_f/rho(A)");
  if (lambda0.size() != p.c_dim()) throw ConfigError("run_inexact_ama: lambda0 dimension");
  if (opts.delta_override && static_cast<int>(opts.delta_override->size()) < opts.K)
    throw ConfigError("run_inexact_ama: delta override shorter than K");
  if (opts.theta_override && static_cast<int>(opts.theta_override->size()) < opts.K)
    throw ConfigError("run_inexact_ama: theta override shorter than K");

  Rng rng(opts.seed);
  ZStepSolver zstep(p, tau);

  AmaTrace tr;
  tr.tau = tau;
  tr.K = opts.K;
  tr.momentum = momentum;
  tr.lambda.push_back(lambda0);
  if (momentum) tr.lambda_hat.push_back(lambda0);

  Eigen::VectorXd lambda = lambda0, lambda_hat = lambda0;
  Eigen::VectorXd lambda_sum = Eigen::VectorXd::Zero(lambda0.size());
  Eigen::VectorXd x_warm, z_warm;

  for (int k = 1; k <= opts.K; ++k) {
    const Eigen::VectorXd& mult = momentum ? lambda_hat : lambda;

    // step 1: x~ = argmin f - <mult, Ax>, then + delta^k
    Eigen::VectorXd x_exact = p.x_star(mult, x_warm.size() ? &x_warm : nullptr);
    Eigen::VectorXd x_tilde;
    if (opts.delta_override) {
      x_tilde = x_exact + (*opts.delta_override)[k - 1];
    } else {
      x_tilde = inject_block_error(p, x_exact, opts.delta_sched(k), opts.feasible_only, rng);
    }
    Eigen::VectorXd delta = x_tilde - x_exact;
    x_warm = x_tilde;

    // step 2: augmented z minimization at q = mult + tau (c - A x~), then + theta^k
    Eigen::VectorXd q = mult + tau * (p.c() - p.A() * x_tilde);
    Eigen::VectorXd z_exact = zstep.solve(q, z_warm.size() ? &z_warm : nullptr);
    Eigen::VectorXd z_tilde;
    if (opts.theta_override) {
      z_tilde = z_exact + (*opts.theta_override)[k - 1];
    } else {
      const double mag = opts.theta_sched(k);
      if (mag > 0 && p.g().is_indicator() && opts.feasible_only) {
        z_tilde = p.g().set().project(z_exact + mag * rng.unit_direction(z_exact.size()));
      } else if (mag > 0) {
        z_tilde = z_exact + mag * rng.unit_direction(z_exact.size());
      } else {
        z_tilde = z_exact;
      }
    }
    Eigen::VectorXd theta = z_tilde - z_exact;
    z_warm = z_tilde;

    // step 3: multiplier update (exact)
    Eigen::VectorXd lambda_next = mult + tau * (p.c() - p.A() * x_tilde - p.B() * z_tilde);
    if (momentum) {
      const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
      lambda_hat = lambda_next + beta * (lambda_next - lambda);
    }
    lambda = lambda_next;

    lambda_sum += lambda;
    Eigen::VectorXd lambda_bar = lambda_sum / k;

    const double b_theta = (p.B() * theta).norm();
    tr.lambda.push_back(lambda);
    if (momentum) tr.lambda_hat.push_back(lambda_hat);
    if (opts.record_iterates) {
      tr.x_tilde.push_back(x_tilde);
      tr.z_tilde.push_back(z_tilde);
    }
    tr.lambda_avg.push_back(lambda_bar);
    tr.delta_norm.push_back(delta.norm());
    tr.a_delta_norm.push_back((p.A() * delta).norm());
    tr.theta_norm.push_back(theta.norm());
    tr.b_theta_norm.push_back(b_theta);
    tr.eps_equiv.push_back(tau * tau * opts.L_psi * b_theta + 0.5 * tau * tau * b_theta * b_theta);
    if (opts.record_error_vectors) {
      tr.delta_vec.push_back(delta);
      tr.theta_vec.push_back(theta);
    }
    if (opts.compute_dual) {
      tr.dual_last.push_back(p.dual_value(lambda, opts.inner_tol));
      tr.dual_avg.push_back(p.dual_value(lambda_bar, opts.inner_tol));
    }
  }
  return tr;
}

}  // namespace

AmaTrace run_inexact_ama(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                         const AmaOptions& opts) {
  return run_ama_impl(p, lambda0, opts, false);
}

AmaTrace run_inexact_fama(const SplitProblem& p, const Eigen::VectorXd& lambda0,
                          const AmaOptions& opts) {
  return run_ama_impl(p, lambda0, opts, true);
}

double verify_dual_equivalence(const SplitProblem& p, const Eigen::VectorXd& lambda0, double tau,
                               int K, const ErrorSchedule& delta_sched,
                               const ErrorSchedule& theta_sched, std::uint64_t seed,
                               bool accelerated) {
  AmaOptions opts;
  opts.tau = tau;
  opts.K = K;
  opts.delta_sched = delta_sched;
  opts.theta_sched = theta_sched;
  opts.seed = seed;
  opts.record_error_vectors = true;
  opts.record_iterates = false;
  AmaTrace ama = accelerated ? run_inexact_fama(p, lambda0, opts)
                             : run_inexact_ama(p, lambda0, opts);

  // Dual-side inexact (A)PGM with the same realized errors: gradient error
  // e^k = A delta^k; the inexact prox is the exact prox of the stepped point
  // minus tau B theta^k.
  ZStepSolver zstep(p, ama.tau);
  Eigen::VectorXd w = lambda0, v = lambda0;
  double deviation = 0.0;
  Eigen::VectorXd x_warm;
  for (int k = 1; k <= K; ++k) {
    const Eigen::VectorXd& base = accelerated ? v : w;
    Eigen::VectorXd e = p.A() * ama.delta_vec[k - 1];
    Eigen::VectorXd step_point =
        base - ama.tau * (p.grad_phi(base, x_warm.size() ? &x_warm : nullptr) + e);
    Eigen::VectorXd w_next = zstep.prox_psi(step_point) - ama.tau * (p.B() * ama.theta_vec[k - 1]);
    if (accelerated) {
      const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
      v = w_next + beta * (w_next - w);
    }
    w = w_next;
    deviation = std::max(deviation, (w - ama.lambda[k]).norm());
  }
  return deviation;
}

// --- bound calculators ------------------------------------------------------

namespace {
void check_series(int k, std::span<const double> a, std::span<const double> b) {
  if (k < 1) throw ConfigError("bound: k must be >= 1");
  if (static_cast<int>(a.size()) < k || static_cast<int>(b.size()) < k)
    throw ConfigError("bound: error series shorter than k");
}
}  // namespace

double ama_dual_bound(int k, double L, double dist0, double tau, double L_psi,
                      std::span<const double> a_delta_norms,
                      std::span<const double> b_theta_norms) {
  check_series(k, a_delta_norms, b_theta_norms);
  double gamma_sum = 0.0, lambda_sum = 0.0;
  for (int p = 1; p <= k; ++p) {
    const double bt = b_theta_norms[p - 1];
    const double m = 2.0 * L_psi * bt + bt * bt;
    gamma_sum += a_delta_norms[p - 1] / L + tau * std::sqrt(m / L);
    lambda_sum += tau * tau * m / (2.0 * L);
  }
  const double r = dist0 + 2.0 * gamma_sum + std::sqrt(2.0 * lambda_sum);
  return L / (2.0 * k) * r * r;
}

double ama_linear_bound(int k, double gamma, double L, double tau, double L_psi, double dist0,
                        std::span<const double> a_delta_norms,
                        std::span<const double> b_theta_norms) {
  check_series(k, a_delta_norms, b_theta_norms);
  if (!(gamma > 0 && gamma <= 1)) throw ConfigError("ama_linear_bound: gamma must be in (0,1]");
  const double q = 1.0 - gamma;
  double bound = std::pow(q, k) * dist0;
  for (int p = 1; p <= k; ++p) {
    const double bt = b_theta_norms[p - 1];
    const double a = a_delta_norms[p - 1] / L + tau * std::sqrt((L_psi * bt + bt * bt) / L);
    bound += (p == k ? 1.0 : std::pow(q, k - p)) * a;
  }
  return bound;
}

double ama_linear_bound(int k, const Eigen::MatrixXd& H, const Eigen::MatrixXd& A, double tau,
                        double L_psi, double dist0, std::span<const double> a_delta_norms,
                        std::span<const double> b_theta_norms) {
  Eigen::MatrixXd M = A * H.llt().solve(A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin <= 1e-12 * lmax)
    throw ConfigError("ama_linear_bound: A must have full row rank");
  return ama_linear_bound(k, lmin / lmax, lmax, tau, L_psi, dist0, a_delta_norms, b_theta_norms);
}

double fama_bound(int k, double L, double dist0, double tau, double L_psi,
                  std::span<const double> a_delta_norms,
                  std::span<const double> b_theta_norms) {
  check_series(k, a_delta_norms, b_theta_norms);
  double gamma_sum = 0.0, lambda_sum = 0.0;
  for (int p = 1; p <= k; ++p) {
    const double bt = b_theta_norms[p - 1];
    const double m = 2.0 * L_psi * bt + bt * bt;
    gamma_sum += p * (a_delta_norms[p - 1] / L + tau * std::sqrt(m / L));
    lambda_sum += static_cast<double>(p) * p * tau * tau * m / (2.0 * L);
  }
  const double r = dist0 + 2.0 * gamma_sum + std::sqrt(2.0 * lambda_sum);
  return 2.0 * L / ((k + 1.0) * (k + 1.0)) * r * r;
}

double ama_bounded_error_bound(int k, double gamma, double L, double dist0, double tau,
                               double L_psi, double norm_A, double norm_B, double delta_bar,
                               double theta_bar) {
  if (k < 0) throw ConfigError("ama_bounded_error_bound: k must be >= 0");
  if (!(gamma > 0 && gamma <= 1)) throw ConfigError("ama_bounded_error_bound: gamma in (0,1]");
  const double bt = norm_B * theta_bar;
  const double delta_term =
      (norm_A * delta_bar / L + tau * std::sqrt((L_psi * bt + bt * bt) / L)) / gamma;
  return std::pow(1.0 - gamma, k) * dist0 + delta_term;
}

DivergingBound fama_bounded_error_bound(int k, double L, double dist0, double tau, double L_psi,
                                        double norm_A, double norm_B, double delta_bar,
                                        double theta_bar) {
  if (k < 1) throw ConfigError("fama_bounded_error_bound: k must be >= 1");
  const double bt = norm_B * theta_bar;
  const double delta =
      norm_A * delta_bar / L + 1.5 * tau * std::sqrt((2.0 * L_psi * bt + norm_B * theta_bar * theta_bar) / L);
  const double r = 2.0 * L * dist0 / (k + 1.0) + k * delta;
  return {r * r, delta > 0.0};
}

// --- classifier --------------------------------------------------------------

namespace {

enum class FamilyClass { kZero, kGeometric, kPower, kConstant };

FamilyClass family_class(const ErrorSchedule& s) {
  if (s.is_zero()) return FamilyClass::kZero;
  switch (s.family()) {
    case ErrorSchedule::Family::kGeometric: return FamilyClass::kGeometric;
    case ErrorSchedule::Family::kPower:
      return s.p() == 0.0 ? FamilyClass::kConstant : FamilyClass::kPower;
    case ErrorSchedule::Family::kConstant: return FamilyClass::kConstant;
    case ErrorSchedule::Family::kZero: return FamilyClass::kZero;
  }
  return FamilyClass::kConstant;
}

struct SingleVerdict {
  ScheduleVerdict::Convergence c;
  std::string why;
};

SingleVerdict classify_one(const ErrorSchedule& s, Algorithm alg, bool quadratic) {
  using C = ScheduleVerdict::Convergence;
  switch (family_class(s)) {
    case FamilyClass::kZero:
      return {C::kYes, "zero errors (exact iterations)"};
    case FamilyClass::kGeometric:
      if (alg == Algorithm::kAma)
        return {C::kYes, quadratic ? "linear error decrease (linear-rate sufficient condition)"
                                   : "geometric series is finitely summable"};
      return {C::kYes, "geometric decrease is O(1/k^{2+kappa}) for every kappa"};
    case FamilyClass::kPower: {
      const double pw = s.p();
      if (alg == Algorithm::kFama) {
        if (pw > 2.0)
          return {C::kYes, "O(1/k^{2+kappa}) with kappa = " + std::to_string(pw - 2.0)};
        return {C::kNotGuaranteed,
                "accelerated sufficient condition needs O(1/k^{2+kappa}), kappa > 0; the "
                "k-weighted error sums do not vanish for p <= 2"};
      }
      if (quadratic) {
        if (pw > 1.0)
          return {C::kYes, "O(1/k^{1+kappa}) with kappa = " + std::to_string(pw - 1.0)};
        if (pw == 1.0)
          return {C::kYes,
                  "1/k boundary case: accepted for the quadratic case via the "
                  "geometric-harmonic series limit (O(1/k) overall rate)"};
        return {C::kNotGuaranteed, "power decrease slower than 1/k"};
      }
      if (pw > 1.0)
        return {C::kYes, "O(1/k^{1+kappa}) with kappa = " + std::to_string(pw - 1.0)};
      return {C::kNotGuaranteed, "needs O(1/k^{1+kappa}) with kappa > 0 (p > 1)"};
    }
    case FamilyClass::kConstant:
      if (alg == Algorithm::kAma && quadratic)
        return {C::kYesToNeighborhood,
                "bounded non-vanishing errors: converges to a neighborhood of size Delta "
                "(bounded-error linear-rate result)"};
      if (alg == Algorithm::kFama)
        return {C::kNotGuaranteed, "bounded-error accelerated bound diverges in k"};
      return {C::kNotGuaranteed, "bounded non-vanishing errors without the quadratic assumption"};
  }
  return {C::kNotGuaranteed, "unknown family"};
}

}  // namespace

ScheduleVerdict classify_schedule(const ErrorSchedule& delta_sched,
                                  const ErrorSchedule& theta_sched, Algorithm algorithm,
                                  bool quadratic_case, bool L_psi_finite) {
  using C = ScheduleVerdict::Convergence;
  ScheduleVerdict v;
  if (!L_psi_finite && !theta_sched.is_zero()) {
    v.converges = C::kNotGuaranteed;
    v.rationale = "L(psi) = +inf with nonzero z-step errors: the epsilon mapping is unbounded";
    return v;
  }
  SingleVerdict d = classify_one(delta_sched, algorithm, quadratic_case);
  SingleVerdict t = theta_sched.is_zero()
                        ? SingleVerdict{C::kYes, "zero errors (exact iterations)"}
                        : classify_one(theta_sched, algorithm, quadratic_case);
  // take the weaker of the two verdicts
  auto rank = [](C c) { return c == C::kYes ? 2 : (c == C::kYesToNeighborhood ? 1 : 0); };
  const SingleVerdict& weaker = rank(d.c) <= rank(t.c) ? d : t;
  v.converges = weaker.c;
  v.rationale = "delta: " + d.why + "; theta: " + t.why;
  if (!L_psi_finite && theta_sched.is_zero())
    v.rationale += "; L(psi) = +inf is immaterial since theta == 0";
  return v;
}

// --- series -------------------------------------------------------------------

int series_switch_index(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("series: alpha must be in (0,1)");
  // alpha^{-k}/k < alpha^{-(k+1)}/(k+1)  <=>  1 + 1/k < 1/alpha
  int k = 1;
  while (!(1.0 + 1.0 / k < 1.0 / alpha)) ++k;
  return k;
}

SeriesBound geometric_harmonic_series(double alpha, int k) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("series: alpha must be in (0,1)");
  if (k < 1) throw ConfigError("series: k must be >= 1");
  SeriesBound out;
  // factored form sum alpha^{k-p}/p keeps every term <= 1
  double value = 0.0;
  for (int p = 1; p <= k; ++p) value += std::pow(alpha, k - p) / p;
  out.value = value;

  const int kp = series_switch_index(alpha);
  const double la = std::log(alpha);
  const double inf = std::numeric_limits<double>::infinity();
  if (k <= kp) {
    out.upper_bound = inf;
    return out;
  }
  const double t3arg = 1.0 + 2.0 / (k * la);
  const double t4arg = 1.0 + 1.0 / (kp * la);
  if (t3arg <= 0.0 || t4arg <= 0.0) {
    out.upper_bound = inf;  // the closed form provides no finite bound here
    return out;
  }
  double head = 0.0;
  for (int p = 1; p <= kp; ++p) head += std::pow(alpha, k - p) / p;
  out.upper_bound =
      head + 1.0 / k - 0.5 * std::log(t3arg) + std::pow(alpha, k - kp) * std::log(t4arg);
  return out;
}

}  // namespace altmin
