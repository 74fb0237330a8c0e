#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "altmin/errors.hpp"
#include "altmin/split_problem.hpp"
#include "oracles.hpp"

using namespace altmin;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Eigen::SparseMatrix<double> sparse(const MatrixXd& d) { return d.sparseView(); }

SplitProblem make_dense_problem(const MatrixXd& H, const VectorXd& h, ProxFn g, const MatrixXd& A,
                                const MatrixXd& B, const VectorXd& c) {
  std::vector<FBlock> blocks;
  blocks.push_back({QuadraticFn(H, h), ConvexSet::unbounded(h.size())});
  return SplitProblem(std::move(blocks), std::move(g), sparse(A), sparse(B), c);
}

}  // namespace

TEST_CASE("dual constants: identity Hessian gives grad phi = lambda and L = 1") {
  const int n = 3;
  SplitProblem p = make_dense_problem(MatrixXd::Identity(n, n), VectorXd::Zero(n),
                                      ProxFn::zero(n), MatrixXd::Identity(n, n),
                                      -MatrixXd::Identity(n, n), VectorXd::Zero(n));
  auto g = oracles::test_rng(1);
  VectorXd lam = oracles::random_vector(n, g);
  CHECK((p.grad_phi(lam) - lam).norm() <= 1e-12);
  CHECK(p.dual_constants().L_quad == doctest::Approx(1.0));
  CHECK(p.dual_constants().L_generic == doctest::Approx(1.0));  // sigma_f^{-1} rho(A) = 1
}

TEST_CASE("dual constants for diag(2,4): L = 1/2, sigma = 1/4, gamma = 1/2") {
  MatrixXd H(2, 2);
  H << 2, 0, 0, 4;
  SplitProblem p = make_dense_problem(H, VectorXd::Zero(2), ProxFn::zero(2),
                                      MatrixXd::Identity(2, 2), -MatrixXd::Identity(2, 2),
                                      VectorXd::Zero(2));
  const auto& c = p.dual_constants();
  CHECK(c.L_quad == doctest::Approx(0.5));
  CHECK(c.sigma_phi == doctest::Approx(0.25));
  CHECK(c.gamma == doctest::Approx(0.5));
  CHECK(c.f_unconstrained);
}

TEST_CASE("grad phi matches the finite-difference gradient of f*(A' lambda)") {
  auto g = oracles::test_rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4, m = 3;
    MatrixXd H = oracles::random_spd(n, g);
    VectorXd h = oracles::random_vector(n, g);
    MatrixXd A = oracles::random_matrix(m, n, g);
    SplitProblem p = make_dense_problem(H, h, ProxFn::zero(m), A, -MatrixXd::Identity(m, m),
                                        VectorXd::Zero(m));
    VectorXd lam = oracles::random_vector(m, g);
    VectorXd fd = oracles::fd_gradient([&](const VectorXd& l) { return p.phi_value(l); }, lam);
    VectorXd an = p.grad_phi(lam);
    CHECK((fd - an).norm() <= 1e-6 * (1.0 + an.norm()));
  }
}

TEST_CASE("x* for quadratic f solves H x = A' lambda - h") {
  auto g = oracles::test_rng(9);
  const int n = 5, m = 4;
  MatrixXd H = oracles::random_spd(n, g);
  VectorXd h = oracles::random_vector(n, g);
  MatrixXd A = oracles::random_matrix(m, n, g);
  SplitProblem p =
      make_dense_problem(H, h, ProxFn::zero(m), A, -MatrixXd::Identity(m, m), VectorXd::Zero(m));
  VectorXd lam = oracles::random_vector(m, g);
  VectorXd x = p.x_star(lam);
  CHECK((H * x - (A.transpose() * lam - h)).norm() <= 1e-10);
}

TEST_CASE("dual value: unbounded g-block returns the -inf sentinel") {
  // scalar split f = x^2/2, g = 0, A = 1, B = -1, c = 0
  SplitProblem p = make_dense_problem(MatrixXd::Identity(1, 1), VectorXd::Zero(1), ProxFn::zero(1),
                                      MatrixXd::Identity(1, 1), -MatrixXd::Identity(1, 1),
                                      VectorXd::Zero(1));
  auto at0 = p.dual_value(VectorXd::Zero(1));
  CHECK(at0.finite);
  CHECK(at0.value == doctest::Approx(0.0).epsilon(1e-12));
  auto off = p.dual_value(VectorXd::Constant(1, 0.5));
  CHECK(!off.finite);
  CHECK(off.value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("dual value at the optimum equals the primal optimum (strong duality)") {
  // two unconstrained quadratic blocks linked by z: min f1(x1)+f2(x2)
  // s.t. x - E z = 0 with E stacking two copies
  auto g = oracles::test_rng(13);
  MatrixXd H1 = oracles::random_spd(2, g), H2 = oracles::random_spd(2, g);
  VectorXd h1 = oracles::random_vector(2, g), h2 = oracles::random_vector(2, g);
  std::vector<FBlock> blocks;
  blocks.push_back({QuadraticFn(H1, h1), ConvexSet::unbounded(2)});
  blocks.push_back({QuadraticFn(H2, h2), ConvexSet::unbounded(2)});
  MatrixXd E(4, 2);
  E << MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2);
  SplitProblem p(std::move(blocks), ProxFn::zero(2), sparse(MatrixXd::Identity(4, 4)),
                 sparse(-E), VectorXd::Zero(4));

  // primal optimum: min over v of f1(v) + f2(v)
  MatrixXd Hs = H1 + H2;
  VectorXd hs = h1 + h2;
  VectorXd v_star = Hs.ldlt().solve(-hs);
  const double primal = 0.5 * v_star.dot(H1 * v_star) + h1.dot(v_star) +
                        0.5 * v_star.dot(H2 * v_star) + h2.dot(v_star);

  // dual optimum via a first-order run is exercised elsewhere; here evaluate
  // D at the analytic multiplier: lambda = grad f_i(v*) blockwise
  VectorXd lam(4);
  lam << H1 * v_star + h1, H2 * v_star + h2;
  auto d = p.dual_value(lam);
  CHECK(d.finite);
  CHECK(d.value == doctest::Approx(primal).epsilon(1e-9));
}

TEST_CASE("z-step oracle solves the augmented minimization for each strategy") {
  auto g = oracles::test_rng(21);
  const double tau = 0.7;

  auto check_optimality = [&](const SplitProblem& p, const VectorXd& q, const VectorXd& zbar,
                              const std::function<double(const VectorXd&)>& gval) {
    // objective m(z) = g(z) + tau/2 ||Bz||^2 - <q, Bz>; random probes must
    // not improve on zbar
    auto m = [&](const VectorXd& z) {
      VectorXd Bz = p.B() * z;
      return gval(z) + 0.5 * tau * Bz.squaredNorm() - q.dot(Bz);
    };
    const double base = m(zbar);
    for (int t = 0; t < 60; ++t) {
      VectorXd probe = zbar + 0.05 * oracles::random_vector(zbar.size(), g);
      CHECK(m(probe) >= base - 1e-9);
    }
  };

  SUBCASE("g = 0, diagonal B'B") {
    MatrixXd E(4, 2);
    E << MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2);
    std::vector<FBlock> blocks;
    blocks.push_back({QuadraticFn(MatrixXd::Identity(4, 4), VectorXd::Zero(4)),
                      ConvexSet::unbounded(4)});
    SplitProblem p(std::move(blocks), ProxFn::zero(2), sparse(MatrixXd::Identity(4, 4)),
                   sparse(-E), VectorXd::Zero(4));
    ZStepSolver zs(p, tau);
    VectorXd q = oracles::random_vector(4, g);
    VectorXd zbar = zs.solve(q);
    check_optimality(p, q, zbar, [](const VectorXd&) { return 0.0; });
  }
  SUBCASE("g = box indicator with B = -I reduces to a clamp") {
    auto set = ConvexSet::box(VectorXd::Constant(3, -0.3), VectorXd::Constant(3, 0.8));
    std::vector<FBlock> blocks;
    blocks.push_back({QuadraticFn(MatrixXd::Identity(3, 3), VectorXd::Zero(3)),
                      ConvexSet::unbounded(3)});
    SplitProblem p(std::move(blocks), ProxFn::indicator(set), sparse(MatrixXd::Identity(3, 3)),
                   sparse(-MatrixXd::Identity(3, 3)), VectorXd::Zero(3));
    ZStepSolver zs(p, tau);
    VectorXd q = oracles::random_vector(3, g);
    VectorXd zbar = zs.solve(q);
    VectorXd expect = (-q / tau).cwiseMax(-0.3).cwiseMin(0.8);
    CHECK((zbar - expect).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
  SUBCASE("g quadratic with a rectangular B") {
    MatrixXd B = oracles::random_matrix(4, 3, g);
    MatrixXd Hg = oracles::random_spd(3, g);
    VectorXd hg = oracles::random_vector(3, g);
    std::vector<FBlock> blocks;
    blocks.push_back({QuadraticFn(MatrixXd::Identity(4, 4), VectorXd::Zero(4)),
                      ConvexSet::unbounded(4)});
    SplitProblem p(std::move(blocks), ProxFn::quadratic(QuadraticFn(Hg, hg)),
                   sparse(MatrixXd::Identity(4, 4)), sparse(B), VectorXd::Zero(4));
    ZStepSolver zs(p, tau);
    VectorXd q = oracles::random_vector(4, g);
    VectorXd zbar = zs.solve(q);
    // stationarity: H_g z + h_g + tau B'B z - B'q = 0
    CHECK((Hg * zbar + hg + tau * B.transpose() * B * zbar - B.transpose() * q).norm() <= 1e-9);
  }
  SUBCASE("g = 0 with column-rank-deficient B is rejected") {
    MatrixXd B = MatrixXd::Zero(2, 2);
    B(0, 0) = 1.0;  // second column identically zero
    std::vector<FBlock> blocks;
    blocks.push_back({QuadraticFn(MatrixXd::Identity(2, 2), VectorXd::Zero(2)),
                      ConvexSet::unbounded(2)});
    SplitProblem p(std::move(blocks), ProxFn::zero(2), sparse(MatrixXd::Identity(2, 2)),
                   sparse(B), VectorXd::Zero(2));
    CHECK_THROWS_AS(ZStepSolver(p, tau), OracleError);
  }
}

TEST_CASE("prox of the dual nonsmooth part projects onto the nullspace of E'") {
  // distributed shape: g = 0, B = -E, c = 0; psi is the indicator of
  // null(E'); its prox is the orthogonal projector
  auto g = oracles::test_rng(33);
  MatrixXd E(6, 3);
  E.setZero();
  E.block(0, 0, 3, 3) = MatrixXd::Identity(3, 3);
  E.block(3, 0, 3, 3) = MatrixXd::Identity(3, 3);
  std::vector<FBlock> blocks;
  blocks.push_back({QuadraticFn(MatrixXd::Identity(6, 6), VectorXd::Zero(6)),
                    ConvexSet::unbounded(6)});
  SplitProblem p(std::move(blocks), ProxFn::zero(3), sparse(MatrixXd::Identity(6, 6)), sparse(-E),
                 VectorXd::Zero(6));
  ZStepSolver zs(p, 0.4);
  MatrixXd proj = MatrixXd::Identity(6, 6) -
                  E * (E.transpose() * E).ldlt().solve(E.transpose() * MatrixXd::Identity(6, 6));
  for (int t = 0; t < 20; ++t) {
    VectorXd v = oracles::random_vector(6, g);
    CHECK((zs.prox_psi(v) - proj * v).norm() <= 1e-12);
  }
}

TEST_CASE("construction rejects inconsistent dimensions") {
  std::vector<FBlock> blocks;
  blocks.push_back({QuadraticFn(MatrixXd::Identity(2, 2), VectorXd::Zero(2)),
                    ConvexSet::unbounded(2)});
  CHECK_THROWS_AS(SplitProblem(std::move(blocks), ProxFn::zero(2),
                               sparse(MatrixXd::Identity(3, 3)),  // cols != x dim
                               sparse(-MatrixXd::Identity(3, 3)), VectorXd::Zero(3)),
                  ConfigError);
}
