#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "altmin/distributed.hpp"
#include "altmin/errors.hpp"
#include "altmin/local_solver.hpp"
#include "instance_helpers.hpp"
#include "oracles.hpp"

using namespace altmin;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

AgentProblem scalar_agent() {
  return {QuadraticFn(MatrixXd::Identity(1, 1), VectorXd::Zero(1)), ConvexSet::unbounded(1)};
}

AgentProblem random_boxed_agent(int n, std::mt19937_64& g) {
  return {QuadraticFn(oracles::random_spd(n, g), oracles::random_vector(n, g)),
          ConvexSet::box(VectorXd::Constant(n, -0.4), VectorXd::Constant(n, 0.3))};
}

}  // namespace

TEST_CASE("zero inner iterations return the warm start") {
  auto a = scalar_agent();
  VectorXd warm = VectorXd::Constant(1, 0.7);
  CHECK((local_pg(a, VectorXd::Zero(1), warm, 0, 0.5) - warm).norm() == 0.0);
}

TEST_CASE("scalar inner run halves the iterate each step") {
  auto a = scalar_agent();
  VectorXd warm = VectorXd::Constant(1, 1.0);
  VectorXd z = local_pg(a, VectorXd::Zero(1), warm, 3, 0.5);
  CHECK(z[0] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("inner step-size and feasibility preconditions") {
  auto a = scalar_agent();
  CHECK_THROWS_AS(local_pg(a, VectorXd::Zero(1), VectorXd::Zero(1), 1, 1.0), ConfigError);
  auto g = oracles::test_rng(1);
  auto boxed = random_boxed_agent(3, g);
  CHECK_THROWS_AS(local_pg(boxed, VectorXd::Zero(3), VectorXd::Constant(3, 5.0), 1,
                           0.5 / boxed.lipschitz()),
                  ConfigError);
}

TEST_CASE("inner iterates stay feasible and contract at the certified rate") {
  auto g = oracles::test_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_boxed_agent(5, g);
    const double tau = 0.99 / a.lipschitz();
    const double gamma = a.sigma() / a.lipschitz();
    VectorXd lam = oracles::random_vector(5, g);
    VectorXd z_star = agent_exact_solve(a, lam);
    VectorXd warm = a.set.project(oracles::random_vector(5, g));
    const double d0 = (warm - z_star).norm();
    VectorXd z = warm;
    for (int j = 1; j <= 15; ++j) {
      z = local_pg(a, lam, z, 1, tau);
      CHECK(a.set.contains(z));
      CHECK((z - z_star).norm() <= d0 * std::pow(1.0 - gamma, j) * (1 + 1e-9));
    }
  }
}

TEST_CASE("custom projection oracles drive the generic local solve path") {
  // ball constraint supplied as a user projection oracle
  auto ball = ConvexSet::custom(3, [](const VectorXd& v) {
    const double n = v.norm();
    return n <= 0.5 ? v : VectorXd(0.5 * v / n);
  });
  auto g = oracles::test_rng(91);
  AgentProblem a{QuadraticFn(oracles::random_spd(3, g), oracles::random_vector(3, g)), ball};
  VectorXd lam = oracles::random_vector(3, g);
  VectorXd z = agent_exact_solve(a, lam);
  CHECK(z.norm() <= 0.5 + 1e-9);
  // stationarity on the ball: the projected-gradient residual vanishes
  VectorXd step = z - (a.f.gradient(z) - lam) / a.f.lipschitz();
  CHECK((z - ball.project(step)).lpNorm<Eigen::Infinity>() <= 1e-9);
  VectorXd warm = ball.project(VectorXd::Zero(3));
  CHECK(local_pg(a, lam, warm, 5, 0.9 / a.lipschitz()).norm() <= 0.5 + 1e-9);
}

TEST_CASE("iteration certificate: clamps, frozen value, exact-contraction case") {
  CHECK(certify_iterations(0.5, 0.5, 0.0, 0.3, 2.0) == 0);  // no decrease demanded
  CHECK(certify_iterations(0.25, 0.5, 0.5, 0.5, 1.0) == 2); // log_{1/2}(1/4)
  CHECK(certify_iterations(1.0, 0.1, 0.0, 0.5, 1.0) == 0);  // ratio > 1
  CHECK(certify_iterations(0.1, 0.5, 0.0, 1.0, 1.0) == 1);  // gamma = 1
  CHECK(certify_iterations(1.0, 0.5, 0.0, 1.0, 1.0) == 0);
  CHECK_THROWS_AS(certify_iterations(0.0, 0.5, 0.0, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(certify_iterations(0.1, 0.5, -1.0, 0.5, 1.0), ConfigError);
}

TEST_CASE("argmin Lipschitz constant") {
  CHECK(lipschitz_of_argmin(MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  MatrixXd H(2, 2);
  H << 2, 0, 0, 5;
  CHECK(lipschitz_of_argmin(H) == doctest::Approx(0.5));
  CHECK_THROWS_AS(lipschitz_of_argmin(MatrixXd::Zero(2, 2)), ConfigError);
}

TEST_CASE("empirical argmin Lipschitz bound over 1000 multiplier pairs") {
  auto g = oracles::test_rng(5);
  auto a = random_boxed_agent(6, g);
  const double Lz = lipschitz_of_argmin(a.f.H());
  for (int t = 0; t < 1000; ++t) {
    VectorXd l1 = oracles::random_vector(6, g), l2 = oracles::random_vector(6, g);
    VectorXd z1 = agent_exact_solve(a, l1), z2 = agent_exact_solve(a, l2);
    CHECK((z1 - z2).norm() <= Lz * (l1 - l2).norm() + 1e-10);
  }
}

TEST_CASE("exact minimal iteration count") {
  auto a = scalar_agent();
  SUBCASE("warm start already within tolerance") {
    VectorXd z_star = agent_exact_solve(a, VectorXd::Zero(1));
    CHECK(exact_min_iterations(a, VectorXd::Zero(1), z_star, 0.1, 0.5) == 0);
  }
  SUBCASE("frozen scalar value: 1, 1/2, 1/4, 1/8 needs three steps for 0.2") {
    CHECK(exact_min_iterations(a, VectorXd::Zero(1), VectorXd::Constant(1, 1.0), 0.2, 0.5) == 3);
  }
  SUBCASE("cap exceeded raises") {
    CHECK_THROWS_AS(
        exact_min_iterations(a, VectorXd::Zero(1), VectorXd::Constant(1, 1.0), 1e-9, 0.5, 5),
        NumericalError);
  }
}

TEST_CASE("certificate dominates the exact minimal count on matched inputs") {
  auto g = oracles::test_rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    auto a = random_boxed_agent(4, g);
    const double tau = 0.99 / a.lipschitz();
    const double gamma = a.sigma() / a.lipschitz();
    const double Lz = lipschitz_of_argmin(a.f.H());
    VectorXd lam_prev = oracles::random_vector(4, g);
    VectorXd lam = lam_prev + 0.1 * oracles::random_vector(4, g);
    VectorXd warm = agent_exact_solve(a, lam_prev);
    const double alpha_prev = 0.8, alpha_k = 0.4;
    const double beta = (lam - lam_prev).norm();
    // the induction premise: the warm start is within alpha_prev of the
    // previous optimum (holds by construction, warm is that optimum)
    const int J_cert = certify_iterations(alpha_k, alpha_prev, beta, gamma, Lz);
    const int J_exact = exact_min_iterations(a, lam, warm, alpha_k, tau);
    CHECK(J_cert >= J_exact);
    // and the certificate is sound: after J_cert steps the error is within
    VectorXd z = local_pg(a, lam, warm, J_cert, tau);
    VectorXd z_star = agent_exact_solve(a, lam);
    CHECK((z - z_star).norm() <= alpha_k * (1 + 1e-9));
  }
}

TEST_CASE("certified distributed run keeps every local error below alpha^k") {
  GeneratedInstance gi = helpers::make_instance(6, 19, 2.0, 6);
  const NetworkProblem& np = gi.condensed.problem;
  CertifiedLocalSolver::Options copts;
  copts.alpha = DecreaseFunction::power(1.0, 1.0);
  copts.with_exact_count = true;
  CertifiedLocalSolver port(np, copts);
  DistOptions opts;
  opts.K = 50;
  opts.record_delta_measured = true;
  DistTrace tr = run_distributed_iama(np, port, opts);
  const DecreaseFunction& alpha = port.alpha();
  for (int k = 1; k <= opts.K; ++k) {
    for (int i = 0; i < np.M(); ++i) {
      CHECK(tr.delta_measured[k - 1][i] <= alpha.value(k) * (1 + 1e-9));
      CHECK(tr.J_certified[k - 1][i] >= tr.J_exact[k - 1][i]);
    }
    CHECK(tr.et_lambda_inf[k - 1] <= 1e-12);
  }
  // warm-start chaining: the first certified step certifies J_1 = 0 because
  // alpha^1 = alpha^0 and beta^1 = 0 under zero initialization
  CHECK(tr.J_certified[0] == std::vector<int>(np.M(), 0));
}

TEST_CASE("certified run converges with the 1/k decrease function") {
  GeneratedInstance gi = helpers::make_instance(5, 23, 2.0, 5);
  const NetworkProblem& np = gi.condensed.problem;
  VectorXd u_star = monolithic_solve(np);
  CertifiedLocalSolver::Options copts;
  copts.alpha = DecreaseFunction::power(1.0, 1.0);
  CertifiedLocalSolver port(np, copts);
  DistOptions opts;
  opts.K = 400;
  DistTrace tr = run_distributed_iama(np, port, opts);
  CHECK((tr.v.back() - u_star).norm() <= 1e-2 * (tr.v.front() - u_star).norm());
}
