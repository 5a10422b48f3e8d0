// Conforming tetrahedral meshes: oriented edges/faces, boundary tags,
// vertex patches, hat functions, red refinement, and the plain-text mesh
// file format.
#ifndef COMMUTEPROJ_MESH_HPP
#define COMMUTEPROJ_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpj {

enum class BoundaryTag { Interior, Dirichlet, Neumann };

struct Face {
  std::array<int, 3> v;          // ascending vertex ids (global orientation)
  Eigen::Vector3d normal;        // fixed unit normal (sorted-triple rule)
  BoundaryTag tag = BoundaryTag::Interior;
  std::array<int, 2> elements{-1, -1};  // adjacent tets, second -1 on boundary
};

struct Edge {
  std::array<int, 2> v;          // ascending vertex ids; tangent points v0->v1
};

struct Tet {
  std::array<int, 4> v;          // ascending ids (topology/orientation)
  std::array<int, 4> vref;       // refinement ordering (Bey's rule operates
                                 // on this tuple; input order, possibly
                                 // reversed to keep children positive)
  std::array<int, 4> faces;      // face opposite to local vertex i
  std::array<int, 6> edges;      // local edge order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
  double volume = 0.0;
  double diameter = 0.0;         // h_K
  double insphere_diameter = 0.0;  // rho_K = 2 * 3V/A
  Eigen::Vector3d centroid;
};

enum class PatchClass { Interior, NeumannBoundary, DirichletBoundary };

struct VertexPatch {
  int vertex = -1;
  PatchClass cls = PatchClass::Interior;
  std::vector<int> elements;       // ascending element ids
  std::vector<int> dirichlet_faces;  // gamma_D: Dirichlet faces containing the vertex
  double diameter = 0.0;           // h_omega_a
};

class TetMesh {
 public:
  TetMesh(std::vector<Eigen::Vector3d> nodes,
          std::vector<std::array<int, 4>> tets,
          const std::vector<std::pair<std::array<int, 3>, BoundaryTag>>&
              boundary_face_tags);

  int num_vertices() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(tets_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Eigen::Vector3d& node(int v) const { return nodes_[v]; }
  const Tet& tet(int k) const { return tets_[k]; }
  const Face& face(int f) const { return faces_[f]; }
  const Edge& edge(int e) const { return edges_[e]; }

  const std::vector<int>& vertex_elements(int v) const {
    return vertex_elements_[v];
  }

  /// max_K h_K / rho_K.
  double shape_regularity() const;
  double max_diameter() const;

  VertexPatch vertex_patch(int vertex) const;

  /// Hat function of `vertex` restricted to `element`: value at x and the
  /// element-constant gradient. Throws if the element does not contain the
  /// vertex.
  std::pair<double, Eigen::Vector3d> hat_eval(int vertex, int element,
                                              const Eigen::Vector3d& x) const;
  /// Element-constant gradient of the barycentric coordinate of local
  /// vertex `lv` on `element`.
  Eigen::Vector3d barycentric_gradient(int element, int lv) const;

  /// Red refinement: each tet split into 8 via edge midpoints; boundary tags
  /// inherited.
  TetMesh uniform_refine() const;

  /// True if the (relative) boundary of the domain has any face with the tag.
  bool has_tag(BoundaryTag t) const;

 private:
  std::vector<Eigen::Vector3d> nodes_;
  std::vector<Tet> tets_;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> vertex_elements_;

  void build_topology(const std::vector<std::pair<std::array<int, 3>, BoundaryTag>>&);
};

/// Parse the plain-text mesh format ($nodes/$tets/$bfaces) or a generator
/// name: "reftet", "cube-kuhn", "cube-kuhn:refined=k", optional ":bc=D|N".
TetMesh make_mesh(const std::string& spec);
TetMesh read_mesh(std::istream& in);
TetMesh reference_tet(BoundaryTag tag = BoundaryTag::Dirichlet);
TetMesh cube_kuhn(int refinements = 0, BoundaryTag tag = BoundaryTag::Dirichlet);

}  // namespace cpj

#endif
