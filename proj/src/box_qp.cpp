#include "altmin/box_qp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <vector>

#include "altmin/errors.hpp"

namespace altmin {
namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& z, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return z.cwiseMax(lo).cwiseMin(hi);
}

// inf-norm of the unit-step projected-gradient mapping z - Proj(z - g)
double residual(const Eigen::VectorXd& z, const Eigen::VectorXd& g,
                const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return (z - clamp(z - g, lo, hi)).lpNorm<Eigen::Infinity>();
}

}  // namespace

BoxQpResult solve_box_qp_raw(const Eigen::MatrixXd& H, double lipschitz,
                             const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const BoxQpOptions& opts) {
  const Eigen::Index n = q.size();
  if (H.rows() != n || H.cols() != n || lo.size() != n || hi.size() != n)
    throw ConfigError("solve_box_qp: dimension mismatch");

  BoxQpResult out;
  const bool unconstrained = !lo.array().isFinite().any() && !hi.array().isFinite().any();
  if (unconstrained) {
    out.z = Eigen::LLT<Eigen::MatrixXd>(H).solve(-q);
    out.kkt_residual = (H * out.z + q).lpNorm<Eigen::Infinity>();
    return out;
  }

  const double scale = 1.0 + q.lpNorm<Eigen::Infinity>();
  const double tol = opts.tol * scale;
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd z = opts.warm ? clamp(*opts.warm, lo, hi) : clamp(Eigen::VectorXd::Zero(n), lo, hi);
  Eigen::VectorXd g = H * z + q;
  double res = residual(z, g, lo, hi);

  int pg_budget = opts.max_pg;
  auto pg_steps = [&](int count) {
    for (int it = 0; it < count && pg_budget > 0 && res > tol; ++it, --pg_budget) {
      z = clamp(z - step * g, lo, hi);
      g = H * z + q;
      res = residual(z, g, lo, hi);
      ++out.pg_iterations;
    }
  };

  pg_steps(500);

  // Active-set polish: pin coordinates at bounds whose gradient pushes
  // outward, solve the free block exactly, repeat until KKT holds.
  const double eps_act = 1e-9 * scale;
  for (int round = 0; round < opts.max_polish && res > tol; ++round) {
    std::vector<Eigen::Index> free_idx;
    Eigen::VectorXd z_fixed = z;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lo = std::isfinite(lo[i]) && z[i] - lo[i] <= eps_act && g[i] >= 0;
      const bool at_hi = std::isfinite(hi[i]) && hi[i] - z[i] <= eps_act && g[i] <= 0;
      if (at_lo)
        z_fixed[i] = lo[i];
      else if (at_hi)
        z_fixed[i] = hi[i];
      else
        free_idx.push_back(i);
    }
    if (!free_idx.empty()) {
      const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
      Eigen::MatrixXd Hff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs[a] = -q[free_idx[a]];
        for (Eigen::Index b = 0; b < nf; ++b) Hff(a, b) = H(free_idx[a], free_idx[b]);
      }
      // move the pinned-coordinate coupling to the right-hand side
      for (Eigen::Index a = 0; a < nf; ++a) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
          acc += H(free_idx[a], i) * z_fixed[i];
        // subtract the free part added above; keep only fixed contributions
        for (Eigen::Index b = 0; b < nf; ++b) acc -= Hff(a, b) * z_fixed[free_idx[b]];
        rhs[a] -= acc;
      }
      Eigen::VectorXd zf = Eigen::LDLT<Eigen::MatrixXd>(Hff).solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) z_fixed[free_idx[a]] = zf[a];
    }
    z = clamp(z_fixed, lo, hi);
    g = H * z + q;
    res = residual(z, g, lo, hi);
    ++out.polish_rounds;
    if (res > tol) pg_steps(25);
  }

  if (res > tol) pg_steps(pg_budget);

  if (res > 10 * tol)
    throw NumericalError("solve_box_qp: tolerance not reached (residual " +
                         std::to_string(res) + ")");
  out.z = std::move(z);
  out.kkt_residual = res;
  return out;
}

BoxQpResult solve_box_qp(const QuadraticFn& f, const Eigen::VectorXd& q_shift,
                         const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                         const BoxQpOptions& opts) {
  const bool unconstrained = !lo.array().isFinite().any() && !hi.array().isFinite().any();
  if (unconstrained) {
    BoxQpResult out;
    out.z = f.solve(q_shift - f.h());
    return out;
  }
  return solve_box_qp_raw(f.H(), f.lipschitz(), f.h() - q_shift, lo, hi, opts);
}

}  // namespace altmin
