#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commuteproj/cls.hpp"
#include "commuteproj/context.hpp"
#include "oracle_utils.hpp"

using namespace cpj;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  return A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("no constraints reduces to the normal equations") {
  std::mt19937_64 rng(3);
  const int n = 7;
  KktProblem prob;
  prob.mass = random_spd(rng, n);
  prob.load = Eigen::VectorXd::Random(n);
  prob.constraints.resize(0, n);
  prob.rhs.resize(0);
  const KktSolution sol = solve_kkt(prob);
  CHECK((prob.mass * sol.x - prob.load).norm() <= 1e-11 * prob.load.norm());
  CHECK(sol.nullspace_dim == n);
}

TEST_CASE("square invertible constraints pin the point") {
  std::mt19937_64 rng(5);
  const int n = 5;
  KktProblem prob;
  prob.mass = random_spd(rng, n);
  prob.load = Eigen::VectorXd::Random(n);
  prob.constraints = random_spd(rng, n);  // invertible
  const Eigen::VectorXd want = Eigen::VectorXd::Random(n);
  prob.rhs = prob.constraints * want;
  const KktSolution sol = solve_kkt(prob);
  CHECK((sol.x - want).norm() <= 1e-10 * want.norm());
  CHECK(sol.nullspace_dim == 0);
}

TEST_CASE("contradictory constraints raise infeasibility") {
  KktProblem prob;
  prob.mass = Eigen::MatrixXd::Identity(3, 3);
  prob.load = Eigen::VectorXd::Zero(3);
  prob.constraints.resize(2, 3);
  prob.constraints << 1, 0, 0, 1, 0, 0;
  prob.rhs.resize(2);
  prob.rhs << 0.0, 1.0;
  CHECK_THROWS_AS(solve_kkt(prob), InfeasibleConstraints);
}

TEST_CASE("redundant consistent rows do not move the minimizer") {
  std::mt19937_64 rng(7);
  const int n = 9;
  KktProblem prob;
  prob.mass = random_spd(rng, n);
  prob.load = Eigen::VectorXd::Random(n);
  prob.constraints = Eigen::MatrixXd::Random(3, n);
  prob.rhs = prob.constraints * Eigen::VectorXd::Random(n);
  const Eigen::VectorXd x0 = solve_kkt(prob).x;

  KktProblem dup = prob;
  dup.constraints.conservativeResize(5, n);
  dup.constraints.row(3) = prob.constraints.row(1);
  dup.constraints.row(4) =
      0.25 * prob.constraints.row(0) - 2.0 * prob.constraints.row(2);
  dup.rhs.conservativeResize(5);
  dup.rhs(3) = prob.rhs(1);
  dup.rhs(4) = 0.25 * prob.rhs(0) - 2.0 * prob.rhs(2);
  const Eigen::VectorXd x1 = solve_kkt(dup).x;
  CHECK((x0 - x1).norm() <= 1e-10 * (1.0 + x0.norm()));
}

TEST_CASE("nullspace dimensions of the differential constraint maps") {
  MeshContext ctx(reference_tet());
  // curl v = 0 on ND_0: constants remain (dimension 3).
  CHECK(nullspace_dimension(ctx.curl_matrix(0, 0)) == 3);
  // div v = 0 on RT_0: dimension 4 - 1.
  CHECK(nullspace_dimension(ctx.div_matrix(0, 0)) == 3);
  CHECK(nullspace_dimension(Eigen::MatrixXd::Zero(0, 6)) == 6);
}

TEST_CASE("solver agrees with the dense pseudo-inverse oracle") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> dims(2, 12);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = dims(rng);
    std::uniform_int_distribution<int> rows(0, n + 2);
    const int m = rows(rng);
    KktProblem prob;
    prob.mass = random_spd(rng, n);
    prob.load = Eigen::VectorXd::Random(n);
    prob.constraints.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) prob.constraints(i, j) = g(rng);
    if (m >= 2) prob.constraints.row(m - 1) = prob.constraints.row(0);  // redundancy
    prob.rhs = prob.constraints * Eigen::VectorXd::Random(n);
    const Eigen::VectorXd x = solve_kkt(prob).x;
    const Eigen::VectorXd y =
        oracle::pinv_kkt(prob.mass, prob.load, prob.constraints, prob.rhs);
    CHECK((x - y).norm() <= 1e-9 * (1.0 + y.norm()));
  }
}

TEST_CASE("stationarity and constraint residual diagnostics are small") {
  std::mt19937_64 rng(13);
  KktProblem prob;
  const int n = 8;
  prob.mass = random_spd(rng, n);
  prob.load = Eigen::VectorXd::Random(n);
  prob.constraints = Eigen::MatrixXd::Random(4, n);
  prob.rhs = prob.constraints * Eigen::VectorXd::Random(n);
  const KktSolution sol = solve_kkt(prob);
  CHECK(sol.constraint_residual <= 1e-10);
  CHECK(sol.stationarity_residual <= 1e-10);
  // Multipliers close the stationarity system.
  const Eigen::VectorXd grad = prob.mass * sol.x - prob.load +
                               prob.constraints.transpose() * sol.multipliers;
  CHECK(grad.norm() <= 1e-9 * (1.0 + prob.load.norm()));
}
