#include "altmin/split_problem.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "altmin/box_qp.hpp"
#include "altmin/errors.hpp"

namespace altmin {
namespace {

double sparse_lmax_sym(const Eigen::SparseMatrix<double>& M) {
  // power iteration on a symmetric PSD matrix
  Eigen::Index n = M.rows();
  if (n == 0) return 0.0;
  if (n <= 400) {
    Eigen::MatrixXd D = Eigen::MatrixXd(M);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .maxCoeff();
  }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = M * v;
    double nl = w.norm();
    if (nl == 0) return 0.0;
    w /= nl;
    if (std::abs(nl - lam) <= 1e-12 * std::max(1.0, nl) && it > 10) return nl;
    lam = nl;
    v = w;
  }
  return lam * (1.0 + 1e-9);  // safe side after fixed budget
}

bool is_identity(const Eigen::SparseMatrix<double>& M) {
  if (M.rows() != M.cols()) return false;
  if (M.nonZeros() != M.rows()) return false;
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
      if (it.row() != it.col() || it.value() != 1.0) return false;
  return true;
}

// argmin over one block: f(x) - <u, x> subject to the block set
Eigen::VectorXd solve_block(const FBlock& b, const Eigen::VectorXd& u,
                            const Eigen::VectorXd* warm, double tol) {
  if (b.set.is_box()) {
    BoxQpOptions opts;
    opts.tol = tol;
    opts.warm = warm;
    return solve_box_qp(b.f, u, b.set.lower(), b.set.upper(), opts).z;
  }
  // generic set: projected gradient with the exact projection oracle
  const double step = 1.0 / b.f.lipschitz();
  Eigen::VectorXd z = warm ? b.set.project(*warm) : b.set.project(Eigen::VectorXd::Zero(b.f.dim()));
  const double scale = 1.0 + u.lpNorm<Eigen::Infinity>() + b.f.h().lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 200000; ++it) {
    Eigen::VectorXd g = b.f.gradient(z) - u;
    Eigen::VectorXd zn = b.set.project(z - step * g);
    if ((zn - z).lpNorm<Eigen::Infinity>() <= tol * scale) return zn;
    z = zn;
  }
  throw NumericalError("f_argmin_shifted: projected gradient did not reach tolerance");
}

}  // namespace

SplitProblem::SplitProblem(std::vector<FBlock> f_blocks, ProxFn g,
                           Eigen::SparseMatrix<double> A, Eigen::SparseMatrix<double> B,
                           Eigen::VectorXd c)
    : blocks_(std::move(f_blocks)), g_(std::move(g)), A_(std::move(A)), B_(std::move(B)),
      c_(std::move(c)) {
  if (blocks_.empty()) throw ConfigError("SplitProblem: no f blocks");
  offsets_.reserve(blocks_.size());
  sigma_f_ = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) {
    if (b.set.dim() != b.f.dim()) throw ConfigError("SplitProblem: block set/objective dims differ");
    offsets_.push_back(x_dim_);
    x_dim_ += b.f.dim();
    sigma_f_ = std::min(sigma_f_, b.f.modulus());
    if (!b.set.is_unbounded_box()) f_constrained_ = true;
  }
  z_dim_ = B_.cols();
  if (A_.cols() != x_dim_) throw ConfigError("SplitProblem: cols(A) != dim(f domain)");
  if (g_.dim() >= 0 && g_.dim() != z_dim_) throw ConfigError("SplitProblem: cols(B) != dim(g domain)");
  if (A_.rows() != c_.size() || B_.rows() != c_.size())
    throw ConfigError("SplitProblem: rows(A), rows(B), dim(c) differ");

  a_identity_ = is_identity(A_);
  rho_A_ = a_identity_ ? 1.0
                       : sparse_lmax_sym(Eigen::SparseMatrix<double>(A_.transpose() * A_));
  norm_B_ = std::sqrt(sparse_lmax_sym(Eigen::SparseMatrix<double>(B_.transpose() * B_)));

  constants_.L_generic = rho_A_ / sigma_f_;
  constants_.f_unconstrained = !f_constrained_;
  double lmin_H = std::numeric_limits<double>::infinity(), lmax_H = 0.0;
  for (const auto& b : blocks_) {
    lmin_H = std::min(lmin_H, b.f.modulus());
    lmax_H = std::max(lmax_H, b.f.lipschitz());
  }
  if (a_identity_) {
    constants_.L_quad = 1.0 / lmin_H;
    constants_.sigma_phi = 1.0 / lmax_H;
  } else {
    if (x_dim_ > 2000)
      throw ConfigError("SplitProblem: dense dual constants not supported at this size");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(x_dim_, x_dim_);
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      H.block(offsets_[i], offsets_[i], blocks_[i].f.dim(), blocks_[i].f.dim()) = blocks_[i].f.H();
    Eigen::MatrixXd Ad = Eigen::MatrixXd(A_);
    Eigen::MatrixXd M = Ad * H.llt().solve(Ad.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
    constants_.L_quad = eig.eigenvalues().maxCoeff();
    constants_.sigma_phi = std::max(eig.eigenvalues().minCoeff(), 0.0);
  }
  constants_.gamma = constants_.sigma_phi / constants_.L_quad;
}

double SplitProblem::f_value(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    acc += blocks_[i].f.value(x.segment(offsets_[i], blocks_[i].f.dim()));
  return acc;
}

Eigen::VectorXd SplitProblem::f_argmin_shifted(const Eigen::VectorXd& u,
                                               const Eigen::VectorXd* warm, double tol) const {
  if (u.size() != x_dim_) throw ConfigError("f_argmin_shifted: dimension mismatch");
  Eigen::VectorXd x(x_dim_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Eigen::Index off = offsets_[i], n = blocks_[i].f.dim();
    Eigen::VectorXd w;
    if (warm) w = warm->segment(off, n);
    x.segment(off, n) = solve_block(blocks_[i], u.segment(off, n), warm ? &w : nullptr, tol);
  }
  return x;
}

double SplitProblem::f_conjugate(const Eigen::VectorXd& u, Eigen::VectorXd* argmax,
                                 double tol) const {
  Eigen::VectorXd x = f_argmin_shifted(u, argmax && argmax->size() == x_dim_ ? argmax : nullptr, tol);
  const double val = u.dot(x) - f_value(x);
  if (argmax) *argmax = x;
  return val;
}

Eigen::VectorXd SplitProblem::x_star(const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd* warm) const {
  return f_argmin_shifted(A_.transpose() * lambda, warm);
}

Eigen::VectorXd SplitProblem::grad_phi(const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd* warm) const {
  return A_ * x_star(lambda, warm);
}

double SplitProblem::phi_value(const Eigen::VectorXd& lambda) const {
  return f_conjugate(A_.transpose() * lambda);
}

std::optional<double> SplitProblem::psi_value(const Eigen::VectorXd& lambda,
                                              double null_tol) const {
  auto conj = g_.conjugate(B_.transpose() * lambda, null_tol);
  if (!conj) return std::nullopt;
  return *conj - c_.dot(lambda);
}

DualValue SplitProblem::dual_value(const Eigen::VectorXd& lambda, double inner_tol) const {
  auto psi = psi_value(lambda);
  if (!psi) return DualValue::minus_infinity();
  const double phi = f_conjugate(A_.transpose() * lambda, nullptr, inner_tol);
  return {-phi - *psi, true};
}

// ---------------------------------------------------------------------------

ZStepSolver::ZStepSolver(const SplitProblem& p, double tau) : p_(&p), tau_(tau) {
  if (tau <= 0) throw ConfigError("ZStepSolver: tau must be > 0");
  const auto& B = p.B();
  const Eigen::Index nz = B.cols();

  // B = +/- I fast path: the z step reduces to a prox of g
  if (B.rows() == B.cols()) {
    bool plus = true, minus = true;
    if (B.nonZeros() == B.rows()) {
      for (int k = 0; k < B.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
          if (it.row() != it.col()) { plus = minus = false; }
          else {
            if (it.value() != 1.0) plus = false;
            if (it.value() != -1.0) minus = false;
          }
        }
    } else {
      plus = minus = false;
    }
    if (plus || minus) {
      strategy_ = Strategy::kScaledIdentityB;
      b_sign_ = plus ? 1.0 : -1.0;
      return;
    }
  }

  Eigen::SparseMatrix<double> btb = Eigen::SparseMatrix<double>(B.transpose() * B);
  bool diagonal = true;
  for (int k = 0; k < btb.outerSize() && diagonal; ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(btb, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) { diagonal = false; break; }

  if (p.g().is_zero()) {
    if (diagonal) {
      btb_diag_inv_ = Eigen::VectorXd::Zero(nz);
      Eigen::VectorXd d = btb.diagonal();
      for (Eigen::Index i = 0; i < nz; ++i) {
        if (d[i] <= 0) throw OracleError("ZStepSolver: B'B singular with g = 0");
        btb_diag_inv_[i] = 1.0 / d[i];
      }
      strategy_ = Strategy::kZeroGDiag;
      return;
    }
    dense_m_ = Eigen::MatrixXd(btb);
    dense_llt_.compute(dense_m_);
    if (dense_llt_.info() != Eigen::Success)
      throw OracleError("ZStepSolver: B'B singular with g = 0");
    strategy_ = Strategy::kZeroGDense;
    return;
  }
  if (p.g().kind() == ProxFn::Kind::kQuadratic) {
    if (nz > 4000) throw ConfigError("ZStepSolver: dense factorization too large");
    // (H_g + tau B'B) z = B'q - h_g
    dense_m_ = p.g().quad().H() + tau_ * Eigen::MatrixXd(btb);
    dense_llt_.compute(dense_m_);
    if (dense_llt_.info() != Eigen::Success)
      throw OracleError("ZStepSolver: quadratic z-step factorization failed");
    strategy_ = Strategy::kQuadratic;
    return;
  }
  if (p.g().is_indicator() && p.g().set().is_box()) {
    dense_m_ = tau_ * Eigen::MatrixXd(btb);
    pg_lipschitz_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense_m_, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .maxCoeff();
    if (pg_lipschitz_ <= 0) throw OracleError("ZStepSolver: B'B singular with indicator g");
    strategy_ = Strategy::kIndicatorPg;
    return;
  }
  throw OracleError("ZStepSolver: no exact oracle for this (g, B) combination");
}

Eigen::VectorXd ZStepSolver::solve(const Eigen::VectorXd& q, const Eigen::VectorXd* warm) const {
  if (q.size() != p_->c_dim()) throw ConfigError("ZStepSolver: dimension mismatch");
  const auto& B = p_->B();
  switch (strategy_) {
    case Strategy::kScaledIdentityB:
      // argmin g(z) + tau/2 ||z -/+ q/tau||^2  ==  prox_{g/tau}(+/- q/tau)
      return p_->g().prox(b_sign_ * q / tau_, 1.0 / tau_);
    case Strategy::kZeroGDiag: {
      Eigen::VectorXd rhs = B.transpose() * q;
      return (btb_diag_inv_.array() * rhs.array()).matrix() / tau_;
    }
    case Strategy::kZeroGDense:
      return dense_llt_.solve(B.transpose() * q) / tau_;
    case Strategy::kQuadratic:
      return dense_llt_.solve(B.transpose() * q - p_->g().quad().h());
    case Strategy::kIndicatorPg: {
      Eigen::VectorXd lin = -(B.transpose() * q);
      BoxQpOptions opts;
      opts.tol = 1e-13;
      opts.warm = warm;
      return solve_box_qp_raw(dense_m_, pg_lipschitz_, lin, p_->g().set().lower(),
                              p_->g().set().upper(), opts).z;
    }
  }
  return Eigen::VectorXd();
}

Eigen::VectorXd ZStepSolver::prox_psi(const Eigen::VectorXd& v, const Eigen::VectorXd* warm) const {
  Eigen::VectorXd q = v + tau_ * p_->c();
  Eigen::VectorXd zbar = solve(q, warm);
  return q - tau_ * (p_->B() * zbar);
}

DualObjectives dual_objectives(const SplitProblem& p, double tau) {
  auto solver = std::make_shared<ZStepSolver>(p, tau);
  const SplitProblem* pp = &p;
  DualObjectives d;
  d.constants = p.dual_constants();
  d.phi = [pp](const Eigen::VectorXd& lam) { return pp->phi_value(lam); };
  d.grad_phi = [pp](const Eigen::VectorXd& lam) { return pp->grad_phi(lam); };
  d.psi = ProxFn::custom(
      p.c_dim(),
      [pp](const Eigen::VectorXd& lam) {
        auto v = pp->psi_value(lam);
        return v ? *v : std::numeric_limits<double>::infinity();
      },
      [solver](const Eigen::VectorXd& v, double t) {
        if (std::abs(t - solver->tau()) > 1e-12 * solver->tau())
          throw ConfigError("dual psi prox: tau differs from the factored one");
        return solver->prox_psi(v);
      });
  return d;
}

}  // namespace altmin
