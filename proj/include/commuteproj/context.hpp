// MeshContext: owns a mesh plus lazily built per-element machinery
// (quadrature rules, orthonormal bases, canonical DOF systems, curl/div
// coefficient maps, entity trace bases). Single-threaded construction;
// read-only use afterwards.
#ifndef COMMUTEPROJ_CONTEXT_HPP
#define COMMUTEPROJ_CONTEXT_HPP

#include <map>
#include <memory>

#include "commuteproj/interp.hpp"
#include "commuteproj/mesh.hpp"
#include "commuteproj/polyspace.hpp"
#include "commuteproj/quadrature.hpp"

namespace cpj {

class MeshContext {
 public:
  explicit MeshContext(TetMesh mesh) : mesh_(std::move(mesh)) {}

  const TetMesh& mesh() const { return mesh_; }

  const QuadRule& tet_rule(int element, int degree);
  const QuadRule& face_rule(int face, int degree);
  const QuadRule& edge_rule(int edge, int degree);

  const BasisSet& basis(int element, Family f, int q);
  const CanonicalSystem& canonical(int element, Family f, int q);
  const EntityBasis& face_scalar_basis(int face, int q);
  const EntityBasis& edge_scalar_basis(int edge, int q);

  /// Coefficient map of curl: ND_q(K) -> RT_q(K) (orthonormal frames).
  const Eigen::MatrixXd& curl_matrix(int element, int q);
  /// Coefficient map of div: RT_q(K) -> P_q(K).
  const Eigen::MatrixXd& div_matrix(int element, int q);

  FaceGeom face_geom(int face) const;
  Eigen::Vector3d edge_tangent(int edge) const;

  /// Hat function of `vertex` restricted to `element` as a polynomial.
  Poly hat_poly(int element, int vertex) const;
  Eigen::Vector3d hat_gradient(int element, int vertex) const;

  /// Symbolic restriction of a broken field to one element.
  VPoly field_on_element(const BrokenField& field, int element);

 private:
  TetMesh mesh_;
  std::map<std::pair<int, int>, QuadRule> tet_rules_, face_rules_, edge_rules_;
  std::map<std::tuple<int, int, int>, BasisSet> bases_;
  std::map<std::tuple<int, int, int>, CanonicalSystem> canonical_;
  std::map<std::pair<int, int>, EntityBasis> face_bases_, edge_bases_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> curl_maps_, div_maps_;
};

}  // namespace cpj

#endif
