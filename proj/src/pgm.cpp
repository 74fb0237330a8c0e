#include "altmin/pgm.hpp"

#include <cmath>

#include "altmin/errors.hpp"
#include "altmin/rng.hpp"

namespace altmin {

Composite make_quadratic_composite(QuadraticFn phi, ProxFn psi) {
  auto q = std::make_shared<QuadraticFn>(std::move(phi));
  Composite f;
  f.phi = [q](const Eigen::VectorXd& w) { return q->value(w); };
  f.grad_phi = [q](const Eigen::VectorXd& w) { return q->gradient(w); };
  f.lipschitz = q->lipschitz();
  f.modulus = q->modulus();
  f.psi = std::move(psi);
  return f;
}

namespace {

PgmTrace run_pgm_impl(const Composite& f, const Eigen::VectorXd& w0, const PgmOptions& opts,
                      bool accelerated) {
  if (f.lipschitz <= 0) throw ConfigError("run_inexact_pgm: L(grad phi) must be > 0");
  const double tau = opts.tau > 0 ? opts.tau : 0.99 / f.lipschitz;
  if (!(tau < 1.0 / f.lipschitz))
    throw ConfigError("run_inexact_pgm: step size must satisfy tau < 1/L(grad phi)");
  if (opts.K < 0) throw ConfigError("run_inexact_pgm: K must be >= 0");

  Rng rng(opts.seed);
  PgmTrace tr;
  tr.tau = tau;
  tr.K = opts.K;
  tr.w.reserve(opts.K + 1);
  tr.w.push_back(w0);

  Eigen::VectorXd w = w0, v = w0, sum = Eigen::VectorXd::Zero(w0.size());
  for (int k = 1; k <= opts.K; ++k) {
    const Eigen::VectorXd& base = accelerated ? v : w;

    Eigen::VectorXd e;
    if (opts.e_override) {
      e = opts.e_override(k);
    } else {
      const double mag = opts.e_sched(k);
      e = mag > 0 ? Eigen::VectorXd(mag * rng.unit_direction(w0.size()))
                  : Eigen::VectorXd(Eigen::VectorXd::Zero(w0.size()));
    }
    Eigen::VectorXd step_point = base - tau * (f.grad_phi(base) + e);

    Eigen::VectorXd w_next;
    double eps_achieved = 0.0;
    if (opts.prox_override) {
      auto [pt, ep] = opts.prox_override(k, step_point);
      w_next = std::move(pt);
      eps_achieved = ep;
    } else {
      InexactProxResult r =
          prox_inexact(f.psi, step_point, tau, opts.eps_sched(k), opts.feasible_only, rng);
      w_next = std::move(r.point);
      eps_achieved = r.epsilon;
    }

    if (accelerated) {
      const double beta = static_cast<double>(k - 1) / static_cast<double>(k + 2);
      v = w_next + beta * (w_next - w);
    }
    w = w_next;

    sum += w;
    Eigen::VectorXd avg = sum / k;
    tr.w.push_back(w);
    tr.w_avg.push_back(avg);
    tr.e_norm.push_back(e.norm());
    tr.eps.push_back(eps_achieved);
    if (opts.record_objectives) {
      tr.obj.push_back(f.phi(w) + f.psi.value(w));
      tr.obj_avg.push_back(f.phi(avg) + f.psi.value(avg));
    }
  }
  return tr;
}

}  // namespace

PgmTrace run_inexact_pgm(const Composite& f, const Eigen::VectorXd& w0, const PgmOptions& opts) {
  return run_pgm_impl(f, w0, opts, false);
}

PgmTrace run_inexact_apgm(const Composite& f, const Eigen::VectorXd& w0, const PgmOptions& opts) {
  return run_pgm_impl(f, w0, opts, true);
}

PgmReference pgm_reference(const Composite& f, const Eigen::VectorXd& w0, int k_ref) {
  PgmOptions opts;
  opts.K = k_ref;
  opts.record_objectives = false;
  PgmTrace tr = run_inexact_apgm(f, w0, opts);
  PgmReference ref;
  ref.w_star = tr.w.back();
  ref.phi_star = f.phi(ref.w_star) + f.psi.value(ref.w_star);
  return ref;
}

namespace {
void check_series(int k, std::span<const double> e, std::span<const double> eps) {
  if (k < 1) throw ConfigError("bound: k must be >= 1");
  if (static_cast<int>(e.size()) < k || static_cast<int>(eps.size()) < k)
    throw ConfigError("bound: error series shorter than k");
}
}  // namespace

double pgm_bound_convex(int k, double L, double dist0, std::span<const double> e_norms,
                        std::span<const double> eps_vals) {
  check_series(k, e_norms, eps_vals);
  double gamma_sum = 0.0, lambda_sum = 0.0;
  for (int p = 1; p <= k; ++p) {
    gamma_sum += e_norms[p - 1] / L + std::sqrt(2.0 * eps_vals[p - 1] / L);
    lambda_sum += eps_vals[p - 1] / L;
  }
  const double r = dist0 + 2.0 * gamma_sum + std::sqrt(2.0 * lambda_sum);
  return L / (2.0 * k) * r * r;
}

double pgm_bound_strongly_convex(int k, double L, double sigma_phi, double dist0,
                                 std::span<const double> e_norms,
                                 std::span<const double> eps_vals) {
  check_series(k, e_norms, eps_vals);
  if (!(sigma_phi > 0 && sigma_phi <= L))
    throw ConfigError("pgm_bound_strongly_convex: need 0 < sigma <= L");
  const double gamma = sigma_phi / L;
  const double q = 1.0 - gamma;
  // expanded form (1-g)^k dist0 + sum_p (1-g)^{k-p} a_p avoids overflow of
  // (1-g)^{-p} and handles gamma = 1 (0^0 = 1 at p = k)
  double bound = std::pow(q, k) * dist0;
  for (int p = 1; p <= k; ++p) {
    const double a = e_norms[p - 1] / L + std::sqrt(2.0 / L) * std::sqrt(eps_vals[p - 1]);
    bound += (p == k ? 1.0 : std::pow(q, k - p)) * a;
  }
  return bound;
}

double apgm_bound(int k, double L, double dist0, std::span<const double> e_norms,
                  std::span<const double> eps_vals) {
  check_series(k, e_norms, eps_vals);
  double gamma_sum = 0.0, lambda_sum = 0.0;
  for (int p = 1; p <= k; ++p) {
    gamma_sum += p * (e_norms[p - 1] / L + std::sqrt(2.0 * eps_vals[p - 1] / L));
    lambda_sum += static_cast<double>(p) * p * eps_vals[p - 1] / L;
  }
  const double r = dist0 + 2.0 * gamma_sum + std::sqrt(2.0 * lambda_sum);
  return 2.0 * L / ((k + 1.0) * (k + 1.0)) * r * r;
}

}  // namespace altmin
