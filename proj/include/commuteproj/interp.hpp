// Canonical Raviart-Thomas / Nedelec degrees of freedom (edge, face, and
// volume moments against globally oriented entity frames), the canonical
// elementwise interpolators built on them, and elementwise L2 projections.
#ifndef COMMUTEPROJ_INTERP_HPP
#define COMMUTEPROJ_INTERP_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "commuteproj/polyspace.hpp"

namespace cpj {

class MeshContext;

/// Orthonormal scalar polynomials on a face or edge, represented as
/// trivariate polynomials constant in the normal direction(s).
struct EntityBasis {
  Frame frame;
  std::vector<Poly> funcs;
  int size() const { return static_cast<int>(funcs.size()); }
};

struct FaceGeom {
  Eigen::Vector3d origin;  // centroid
  Eigen::Vector3d t1, t2;  // orthonormal in-face frame from the sorted triple
  Eigen::Vector3d normal;  // fixed global normal
  double scale;            // half-diameter
};

enum class DofDomain { Edge, Face, Volume };

/// One canonical degree of freedom: v -> integral over the entity of
/// (v . dir) * weight.
struct DofFunctional {
  DofDomain domain;
  int entity;   // global edge/face id, or the element id for Volume
  Poly weight;
  Eigen::Vector3d dir;
};

/// The square canonical DOF system of ND_q or RT_q on one element.
struct CanonicalSystem {
  Family family;
  int q = 0;
  int element = -1;
  std::vector<DofFunctional> dofs;
  struct Block {
    DofDomain domain;
    int entity;
    int begin, end;  // dof index range
  };
  std::vector<Block> blocks;
  Eigen::MatrixXd A;  // dofs x basis functions
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

/// Moments of a polynomial field against all DOFs of the system.
Eigen::VectorXd canonical_moments(MeshContext& ctx, const CanonicalSystem& sys,
                                  const VPoly& target);

/// Canonical interpolate of a polynomial field; returns coefficients in the
/// element's orthonormal basis of the target space.
Eigen::VectorXd canonical_interpolate(MeshContext& ctx, int element, Family f,
                                      int q, const VPoly& target);

using VectorFn = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
using ScalarFn = std::function<double(const Eigen::Vector3d&)>;

/// Elementwise L2-orthogonal projection; returns orthonormal coefficients.
Eigen::VectorXd l2_project(MeshContext& ctx, int element, Family f, int q,
                           const VPoly& target);
Eigen::VectorXd l2_project(MeshContext& ctx, int element, Family f, int q,
                           const VectorFn& target, int quad_degree);
Eigen::VectorXd l2_project_scalar(MeshContext& ctx, int element, int q,
                                  const ScalarFn& target, int quad_degree);
Eigen::VectorXd l2_project_scalar(MeshContext& ctx, int element, int q,
                                  const Poly& target);

}  // namespace cpj

#endif
