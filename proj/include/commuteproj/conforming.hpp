// Conforming subspaces of broken ND_q / RT_q over an element subset (a
// vertex patch or the whole mesh). Global DOFs are the canonical entity
// functionals against globally oriented entity frames; essential boundary
// faces carry zero trace by dropping their DOFs.
#ifndef COMMUTEPROJ_CONFORMING_HPP
#define COMMUTEPROJ_CONFORMING_HPP

#include <map>
#include <vector>

#include "commuteproj/context.hpp"

namespace cpj {

class ConformingSpace {
 public:
  ConformingSpace(MeshContext& ctx, std::vector<int> elements, Family family,
                  int q, const std::vector<int>& essential_faces);

  Family family() const { return family_; }
  int degree() const { return q_; }
  int dofs() const { return num_dofs_; }
  const std::vector<int>& elements() const { return elements_; }

  struct ElementMap {
    std::vector<int> gdofs;  // global dof indices entering the element
    Eigen::MatrixXd B;       // local orthonormal coeffs = B * g(gdofs)
  };
  const ElementMap& element_map(int element) const;

  Eigen::VectorXd local_coeffs(int element, const Eigen::VectorXd& g) const;
  BrokenField to_broken(const Eigen::VectorXd& g, int num_mesh_elements) const;

  /// Gram matrix sum_K B_K^T B_K (local bases are orthonormal).
  Eigen::MatrixXd gram() const;
  /// Load vector sum_K B_K^T t_K for a broken target.
  Eigen::VectorXd load_from_broken(const BrokenField& target) const;

  /// Scatter a per-element row block (rows x local dim) into global columns.
  void scatter_rows(int element, const Eigen::MatrixXd& local_rows,
                    Eigen::MatrixXd& global_rows, int row_offset) const;

 private:
  Family family_;
  int q_;
  std::vector<int> elements_;
  std::map<int, ElementMap> maps_;
  int num_dofs_ = 0;
};

/// Faces adjacent to exactly one element of the subset (the relative
/// boundary of the subdomain, including domain-boundary faces).
std::vector<int> subdomain_boundary_faces(const TetMesh& mesh,
                                          const std::vector<int>& elements);

/// Essential faces of the patch spaces H_a(div) / H_a(curl): the whole
/// patch boundary except, for Dirichlet-class patches, the gamma_D faces.
std::vector<int> patch_essential_faces(const TetMesh& mesh,
                                       const VertexPatch& patch);

/// All Neumann-tagged boundary faces (essential set of H_{0,N} spaces).
std::vector<int> neumann_faces(const TetMesh& mesh);

}  // namespace cpj

#endif
