#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commuteproj/quadrature.hpp"
#include "oracle_utils.hpp"

using namespace cpj;

namespace {
const Eigen::Vector3d O(0, 0, 0), E1(1, 0, 0), E2(0, 1, 0), E3(0, 0, 1);

double integrate_monomial(const QuadRule& rule, int a, int b, int c) {
  double s = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const Eigen::Vector3d x = rule.point(i);
    s += rule.weights(i) * std::pow(x(0), a) * std::pow(x(1), b) *
         std::pow(x(2), c);
  }
  return s;
}
}  // namespace

TEST_CASE("reference tet basics") {
  const QuadRule r = tet_rule(O, E1, E2, E3, 2);
  CHECK(integrate_monomial(r, 0, 0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(integrate_monomial(r, 1, 0, 0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("x^2 y^2 z^2 against the closed form at exactness >= 6") {
  const QuadRule r = tet_rule(O, E1, E2, E3, 6);
  const double exact = oracle::reftet_monomial_integral(2, 2, 2);
  CHECK(std::abs(integrate_monomial(r, 2, 2, 2) - exact) <= 1e-14 * exact);
}

TEST_CASE("all monomials up to the exactness degree") {
  for (int degree : {1, 3, 7, 12, 20, 30}) {
    const QuadRule r = tet_rule(O, E1, E2, E3, degree);
    REQUIRE(r.exactness >= degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          if (a + b + c > degree) continue;
          const double exact = oracle::reftet_monomial_integral(a, b, c);
          const double got = integrate_monomial(r, a, b, c);
          CHECK(std::abs(got - exact) <= 1e-13 * exact);
        }
  }
}

TEST_CASE("degree above the tabulated maximum is rejected") {
  CHECK_THROWS(tet_rule(O, E1, E2, E3, 31));
}

TEST_CASE("triangle rule against the closed form") {
  const QuadRule r = tri_rule(O, E1, E2, 8);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      const double exact = oracle::reftri_monomial_integral(a, b);
      CHECK(std::abs(integrate_monomial(r, a, b, 0) - exact) <= 1e-13 * exact);
    }
}

TEST_CASE("segment rule integrates polynomials on a skew segment") {
  const Eigen::Vector3d a(0.2, -0.1, 0.4), b(1.1, 0.7, -0.3);
  const QuadRule r = seg_rule(a, b, 9);
  // integral of t^k over the segment parametrized by arclength.
  const double len = (b - a).norm();
  for (int k = 0; k <= 9; ++k) {
    double s = 0.0;
    for (int i = 0; i < r.size(); ++i) {
      const double t = (r.point(i) - a).norm() / len;
      s += r.weights(i) * std::pow(t, k);
    }
    CHECK(s == doctest::Approx(len / (k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("weights sum to the measure on a random tet") {
  std::mt19937_64 rng(7);
  const TetMesh mesh = oracle::random_tet(rng);
  const auto& t = mesh.tet(0);
  const QuadRule r = tet_rule(mesh.node(t.v[0]), mesh.node(t.v[1]),
                              mesh.node(t.v[2]), mesh.node(t.v[3]), 5);
  CHECK(r.weights.sum() == doctest::Approx(t.volume).epsilon(1e-13));
}
