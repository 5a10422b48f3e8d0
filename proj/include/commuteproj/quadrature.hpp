// Quadrature rules on tetrahedra, triangles, and segments, built as conical
// products of 1D Gauss-Jacobi rules (exact up to total degree 30).
#ifndef COMMUTEPROJ_QUADRATURE_HPP
#define COMMUTEPROJ_QUADRATURE_HPP

#include <Eigen/Dense>

namespace cpj {

/// n-point Gauss-Jacobi rule on [0,1] for the weight (1-x)^alpha.
/// Integrates g(x)*(1-x)^alpha exactly for polynomial g of degree <= 2n-1.
struct Rule1d {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};
Rule1d gauss_jacobi01(int n, int alpha);

/// Quadrature rule in physical coordinates. Weights sum to the measure of
/// the domain (volume, area, or length).
struct QuadRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Eigen::Vector3d point(int i) const { return points.row(i).transpose(); }
};

constexpr int kMaxQuadDegree = 30;

QuadRule tet_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  const Eigen::Vector3d& v2, const Eigen::Vector3d& v3,
                  int degree);
QuadRule tri_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  const Eigen::Vector3d& v2, int degree);
QuadRule seg_rule(const Eigen::Vector3d& v0, const Eigen::Vector3d& v1,
                  int degree);

}  // namespace cpj

#endif
