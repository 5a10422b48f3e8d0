#include "commuteproj/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace cpj {

namespace {

// Golub-Welsch on the Jacobi recurrence for the weight (1-x)^alpha (1+x)^0
// on [-1,1], then mapped to [0,1] with the weight factor absorbed.
Rule1d compute_gauss_jacobi01(int n, int alpha) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi01: n must be >= 1");
  const double a = static_cast<double>(alpha);
  const double b = 0.0;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double diag;
    if (k == 0)
      diag = (b - a) / (a + b + 2.0);
    else {
      const double s = 2.0 * k + a + b;
      diag = (b * b - a * a) / (s * (s + 2.0));
    }
    J(k, k) = diag;
    if (k + 1 < n) {
      const double kk = k + 1.0;
      double off2;
      if (k == 0)
        off2 = 4.0 * (1.0 + a) * (1.0 + b) /
               ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
      else {
        const double s = 2.0 * kk + a + b;
        off2 = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) /
               (s * s * (s + 1.0) * (s - 1.0));
      }
      J(k, k + 1) = J(k + 1, k) = std::sqrt(off2);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, a + b + 1.0) / (a + b + 1.0);  // b = 0

  Rule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);           // node on [-1,1]
    const double w = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    rule.points(i) = 0.5 * (1.0 + x);
    rule.weights(i) = w / std::pow(2.0, a + 1.0);   // maps (1-x)^a to [0,1]
  }
  return rule;
}

const Rule1d& cached_gj(int n, int alpha) {
  static std::map<std::pair<int, int>, Rule1d> cache;
  auto key = std::make_pair(n, alpha);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gauss_jacobi01(n, alpha)).first;
  return it->second;
}

int points_for_degree(int degree) {
  if (degree < 0) degree = 0;
  if (degree > kMaxQuadDegree)
    throw std::invalid_argument("quadrature degree exceeds maximum (30)");
  return degree / 2 + 1;  // 2n-1 >= degree
}

}  // namespace

Rule1d gauss_jacobi01(int n, int alpha) { return cached_gj(n, alpha); }

QuadRule tet_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  const Eigen::Vector3d& v2, const Eigen::Vector3d& v3,
                  int degree) {
  const int n = points_for_degree(degree);
  const Rule1d& rx = cached_gj(n, 2);
  const Rule1d& ry = cached_gj(n, 1);
  const Rule1d& rz = cached_gj(n, 0);

  const double vol6 = (v1 - v0).cross(v2 - v0).dot(v3 - v0);
  // Duffy collapse of the unit tetrahedron; the (1-xi)^2 (1-eta) Jacobian is
  // absorbed in the Gauss-Jacobi weights.
  QuadRule rule;
  rule.points.resize(n * n * n, 3);
  rule.weights.resize(n * n * n);
  rule.exactness = 2 * n - 1;
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double xi = rx.points(i);
        const double eta = ry.points(j);
        const double zeta = rz.points(k);
        const double l1 = xi;
        const double l2 = eta * (1.0 - xi);
        const double l3 = zeta * (1.0 - xi) * (1.0 - eta);
        rule.points.row(idx) =
            (v0 + l1 * (v1 - v0) + l2 * (v2 - v0) + l3 * (v3 - v0)).transpose();
        rule.weights(idx) = rx.weights(i) * ry.weights(j) * rz.weights(k) *
                            std::abs(vol6);
        ++idx;
      }
  return rule;
}

QuadRule tri_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  const Eigen::Vector3d& v2, int degree) {
  const int n = points_for_degree(degree);
  const Rule1d& rx = cached_gj(n, 1);
  const Rule1d& ry = cached_gj(n, 0);

  const double area2 = (v1 - v0).cross(v2 - v0).norm();
  QuadRule rule;
  rule.points.resize(n * n, 3);
  rule.weights.resize(n * n);
  rule.exactness = 2 * n - 1;
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double xi = rx.points(i);
      const double eta = ry.points(j);
      const double l1 = xi;
      const double l2 = eta * (1.0 - xi);
      rule.points.row(idx) = (v0 + l1 * (v1 - v0) + l2 * (v2 - v0)).transpose();
      rule.weights(idx) = rx.weights(i) * ry.weights(j) * area2;
      ++idx;
    }
  return rule;
}

QuadRule seg_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  int degree) {
  const int n = points_for_degree(degree);
  const Rule1d& r = cached_gj(n, 0);
  QuadRule rule;
  rule.points.resize(n, 3);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;
  const double len = (v1 - v0).norm();
  for (int i = 0; i < n; ++i) {
    rule.points.row(i) = (v0 + r.points(i) * (v1 - v0)).transpose();
    rule.weights(i) = r.weights(i) * len;
  }
  return rule;
}

}  // namespace cpj
