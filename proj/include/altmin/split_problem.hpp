#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "altmin/convex_set.hpp"
#include "altmin/objective.hpp"
#include "altmin/quadratic.hpp"

namespace altmin {

/// One block of the first objective: a strictly convex quadratic restricted
/// to a convex set (the set may be the whole space).
struct FBlock {
  QuadraticFn f;
  ConvexSet set;
};

/// Dual value with an explicit -inf sentinel (never NaN).
struct DualValue {
  double value = 0.0;
  bool finite = true;
  static DualValue minus_infinity() { return {-std::numeric_limits<double>::infinity(), false}; }
};

/// Constants of the dual pair (phi, psi).
struct DualConstants {
  double L_generic = 0.0;     // rho(A) / sigma_f
  double L_quad = 0.0;        // lambda_max(A H^-1 A'), quadratic part
  double sigma_phi = 0.0;     // lambda_min(A H^-1 A'), quadratic part
  double gamma = 0.0;         // sigma_phi / L_quad
  bool f_unconstrained = false;  // true when the quadratic constants are exact
  /// Sharper of the two Lipschitz constants (both are recorded).
  double L_sharp() const { return std::min(L_generic, L_quad); }
};

/// Structured two-block program
///   min f(x) + g(z)   s.t.  A x + B z = c
/// with f a sum of constrained quadratic blocks (strongly convex) and g a
/// proximable convex objective.
class SplitProblem {
 public:
  SplitProblem(std::vector<FBlock> f_blocks, ProxFn g,
               Eigen::SparseMatrix<double> A, Eigen::SparseMatrix<double> B,
               Eigen::VectorXd c);

  Eigen::Index x_dim() const { return x_dim_; }
  Eigen::Index z_dim() const { return z_dim_; }
  Eigen::Index c_dim() const { return c_.size(); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const FBlock& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  Eigen::Index block_offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  const ProxFn& g() const { return g_; }
  const Eigen::SparseMatrix<double>& A() const { return A_; }
  const Eigen::SparseMatrix<double>& B() const { return B_; }
  const Eigen::VectorXd& c() const { return c_; }

  double sigma_f() const { return sigma_f_; }
  double rho_A() const { return rho_A_; }      // lambda_max(A'A)
  double norm_A() const { return std::sqrt(rho_A_); }
  double norm_B() const { return norm_B_; }
  bool f_constrained() const { return f_constrained_; }
  bool a_is_identity() const { return a_identity_; }

  /// Default AMA/FAMA step size bound sigma_f / rho(A).
  double step_size_bound() const { return sigma_f_ / rho_A_; }

  double f_value(const Eigen::VectorXd& x) const;  // quadratic part only
  /// argmin_x f(x) - <u, x> over the block constraints (exact oracle).
  Eigen::VectorXd f_argmin_shifted(const Eigen::VectorXd& u,
                                   const Eigen::VectorXd* warm = nullptr,
                                   double tol = 1e-13) const;
  /// f*(u); optionally returns the maximizer.
  double f_conjugate(const Eigen::VectorXd& u, Eigen::VectorXd* argmax = nullptr,
                     double tol = 1e-13) const;

  /// x*(lambda) = argmin_x { f(x) - <lambda, A x> }.
  Eigen::VectorXd x_star(const Eigen::VectorXd& lambda,
                         const Eigen::VectorXd* warm = nullptr) const;
  /// grad phi(lambda) = A x*(lambda).
  Eigen::VectorXd grad_phi(const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd* warm = nullptr) const;
  /// phi(lambda) = f*(A' lambda).
  double phi_value(const Eigen::VectorXd& lambda) const;
  /// psi(lambda) = g*(B' lambda) - c' lambda; nullopt encodes +inf.
  std::optional<double> psi_value(const Eigen::VectorXd& lambda, double null_tol = 1e-8) const;

  /// D(lambda) = -phi(lambda) - psi(lambda); -inf sentinel when the g-block
  /// infimum is unbounded.
  DualValue dual_value(const Eigen::VectorXd& lambda, double inner_tol = 1e-10) const;

  const DualConstants& dual_constants() const { return constants_; }

 private:
  std::vector<FBlock> blocks_;
  std::vector<Eigen::Index> offsets_;
  ProxFn g_;
  Eigen::SparseMatrix<double> A_, B_;
  Eigen::VectorXd c_;
  Eigen::Index x_dim_ = 0, z_dim_ = 0;
  double sigma_f_ = 0.0, rho_A_ = 0.0, norm_B_ = 0.0;
  bool f_constrained_ = false, a_identity_ = false;
  DualConstants constants_;
};

/// Exact solver for AMA's second minimization, factored once per (problem,
/// tau). In the canonical form the minimizer depends on q = lambda +
/// tau*(c - A x~) only:
///   zbar(q) = argmin_z  g(z) + tau/2 ||B z||^2 - <q, B z>.
class ZStepSolver {
 public:
  ZStepSolver(const SplitProblem& p, double tau);

  Eigen::VectorXd solve(const Eigen::VectorXd& q, const Eigen::VectorXd* warm = nullptr) const;
  /// prox_{tau psi}(v) = v + tau c - tau B zbar(v + tau c).
  Eigen::VectorXd prox_psi(const Eigen::VectorXd& v, const Eigen::VectorXd* warm = nullptr) const;
  double tau() const { return tau_; }

 private:
  enum class Strategy { kScaledIdentityB, kZeroGDiag, kZeroGDense, kQuadratic, kIndicatorPg };
  const SplitProblem* p_;
  double tau_;
  Strategy strategy_;
  double b_sign_ = 1.0;
  Eigen::VectorXd btb_diag_inv_;
  Eigen::MatrixXd dense_m_;
  Eigen::LLT<Eigen::MatrixXd> dense_llt_;
  double pg_lipschitz_ = 0.0;
};

/// The dual pair as gradient/prox oracles plus its constants. phi and psi
/// close over the problem; prox_psi is exact (z-step based).
struct DualObjectives {
  std::function<double(const Eigen::VectorXd&)> phi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_phi;
  ProxFn psi;  // custom ProxFn: value via g*, prox via the z-step oracle
  DualConstants constants;
};

/// Builds (phi, psi) for min phi(lambda) + psi(lambda) over multipliers;
/// tau fixes the factorization inside psi's prox oracle. The problem must
/// outlive the returned closures. Non-strongly-convex f never reaches this
/// point (rejected at SplitProblem construction).
DualObjectives dual_objectives(const SplitProblem& p, double tau);

}  // namespace altmin
