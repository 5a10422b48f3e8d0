// Local polynomial spaces P_q, [P_q]^3, ND_q, RT_q on tetrahedra:
// mass-orthonormal bases built from the monomial generating sets, plus
// exact curl/div coefficient maps between them.
#ifndef COMMUTEPROJ_POLYSPACE_HPP
#define COMMUTEPROJ_POLYSPACE_HPP

#include <vector>

#include <Eigen/Dense>

#include "commuteproj/mesh.hpp"
#include "commuteproj/polynomial.hpp"
#include "commuteproj/quadrature.hpp"

namespace cpj {

enum class Family { P, Pvec, ND, RT };

const char* family_name(Family f);

/// Dimension of the local space of degree q on a tetrahedron.
int space_dimension(Family f, int q);

/// Mass-orthonormal basis of a local space on one element. Basis functions
/// are stored both symbolically (VPoly/Poly) and as monomial coefficient
/// matrices for fast evaluation.
struct BasisSet {
  Family family = Family::P;
  int q = 0;
  int element = -1;
  Frame frame;
  int mono_degree = 0;  // monomial table degree backing the coefficients

  std::vector<Poly> sca;   // family P
  std::vector<VPoly> vec;  // vector families
  Eigen::MatrixXd coef[3];  // per component: (#monomials x size); [0] for P

  int size() const {
    return static_cast<int>(family == Family::P ? sca.size() : vec.size());
  }

  /// Values of all basis functions' component c at the points (rows=points).
  Eigen::MatrixXd values(const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts,
                         int component) const;

  /// Symbolic linear combination with the given coefficients.
  VPoly combination(const Eigen::VectorXd& c) const;
  Poly scalar_combination(const Eigen::VectorXd& c) const;
};

Frame element_frame(const TetMesh& mesh, int element);

/// Build the mass-orthonormal basis; `rule` must be exact to degree 2(q+1).
BasisSet build_basis(const TetMesh& mesh, int element, Family f, int q,
                     const QuadRule& rule);

/// Coefficients of a polynomial field in an orthonormal basis (exact L2
/// projection by quadrature). If `require_member`, asserts the field lies in
/// the space (relative residual <= 1e-10).
Eigen::VectorXd coefficients_in_basis(const BasisSet& basis, const VPoly& f,
                                      const QuadRule& rule,
                                      bool require_member = false);
Eigen::VectorXd coefficients_in_basis(const BasisSet& basis, const Poly& f,
                                      const QuadRule& rule,
                                      bool require_member = false);

/// Orthonormalize the span of the columns of `coef` (functions over the
/// monomial frame, per-component blocks) with respect to the L2 Gram computed
/// by `rule`. Rank-revealing eigenvalue cutoff followed by one Cholesky
/// re-orthonormalization pass. Returns the orthonormal coefficient columns.
std::vector<Eigen::MatrixXd> orthonormalize_span(
    const std::vector<Eigen::MatrixXd>& comp_coef, const Frame& frame,
    int mono_degree, const QuadRule& rule, int expected_rank);

/// Elementwise field over the whole mesh: one coefficient vector per element
/// in that element's orthonormal basis (empty vector = zero on the element).
struct BrokenField {
  Family family = Family::ND;
  int q = 0;
  std::vector<Eigen::VectorXd> coef;

  double l2_norm() const;
  static BrokenField zeros(Family f, int q, int num_elements, int dim);
};

}  // namespace cpj

#endif
