#include "commuteproj/conforming.hpp"

#include <algorithm>
#include <set>

namespace cpj {

ConformingSpace::ConformingSpace(MeshContext& ctx, std::vector<int> elements,
                                 Family family, int q,
                                 const std::vector<int>& essential_faces)
    : family_(family), q_(q), elements_(std::move(elements)) {
  if (family_ != Family::ND && family_ != Family::RT)
    throw std::invalid_argument("ConformingSpace: family must be ND or RT");
  std::sort(elements_.begin(), elements_.end());
  const TetMesh& mesh = ctx.mesh();
  const std::set<int> essential(essential_faces.begin(), essential_faces.end());

  std::set<int> edges, faces;
  for (int k : elements_) {
    const Tet& t = mesh.tet(k);
    for (int f : t.faces) faces.insert(f);
    for (int e : t.edges) edges.insert(e);
  }
  // Essential edges: every edge of an essential face (zero tangential trace
  // on a face kills its edge DOFs as well).
  std::set<int> essential_edges;
  for (int f : essential) {
    const auto& fv = mesh.face(f).v;
    for (int e : edges) {
      const auto& ev = mesh.edge(e).v;
      int hit = 0;
      for (int v : ev)
        if (v == fv[0] || v == fv[1] || v == fv[2]) ++hit;
      if (hit == 2) essential_edges.insert(e);
    }
  }

  const int edge_block = q + 1;
  const int face_block_nd = q >= 1 ? q * (q + 1) : 0;  // 2 * dim P_{q-1}(F)
  const int face_block_rt = (q + 1) * (q + 2) / 2;
  const int vol_block = family_ == Family::ND
                            ? (q >= 2 ? 3 * monomial::dimension(q - 2) : 0)
                            : (q >= 1 ? 3 * monomial::dimension(q - 1) : 0);

  // Deterministic global numbering: edges, then faces, then elements,
  // each by ascending global id.
  std::map<int, int> edge_offset, face_offset, vol_offset;
  int next = 0;
  if (family_ == Family::ND)
    for (int e : edges)
      if (!essential_edges.count(e)) {
        edge_offset[e] = next;
        next += edge_block;
      }
  for (int f : faces)
    if (!essential.count(f)) {
      const int nb = family_ == Family::ND ? face_block_nd : face_block_rt;
      if (nb > 0) {
        face_offset[f] = next;
        next += nb;
      }
    }
  for (int k : elements_)
    if (vol_block > 0) {
      vol_offset[k] = next;
      next += vol_block;
    }
  num_dofs_ = next;

  for (int k : elements_) {
    const CanonicalSystem& sys = ctx.canonical(k, family_, q_);
    const int dim = static_cast<int>(sys.dofs.size());
    // Map each canonical functional to a global dof (or to "forced zero").
    std::vector<int> global_of(dim, -1);
    for (const auto& blk : sys.blocks) {
      int base = -1;
      if (blk.domain == DofDomain::Edge) {
        auto it = edge_offset.find(blk.entity);
        if (it != edge_offset.end()) base = it->second;
      } else if (blk.domain == DofDomain::Face) {
        auto it = face_offset.find(blk.entity);
        if (it != face_offset.end()) base = it->second;
      } else {
        auto it = vol_offset.find(blk.entity);
        if (it != vol_offset.end()) base = it->second;
      }
      if (base < 0) continue;
      for (int i = blk.begin; i < blk.end; ++i)
        global_of[i] = base + (i - blk.begin);
    }
    ElementMap em;
    std::vector<int> local_rows;
    for (int i = 0; i < dim; ++i)
      if (global_of[i] >= 0) {
        local_rows.push_back(i);
        em.gdofs.push_back(global_of[i]);
      }
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, static_cast<int>(local_rows.size()));
    for (size_t j = 0; j < local_rows.size(); ++j) S(local_rows[j], j) = 1.0;
    em.B = sys.lu.solve(S);
    maps_.emplace(k, std::move(em));
  }
}

const ConformingSpace::ElementMap& ConformingSpace::element_map(int element) const {
  auto it = maps_.find(element);
  if (it == maps_.end())
    throw std::runtime_error("ConformingSpace: element not in subdomain");
  return it->second;
}

Eigen::VectorXd ConformingSpace::local_coeffs(int element,
                                              const Eigen::VectorXd& g) const {
  const ElementMap& em = element_map(element);
  Eigen::VectorXd sel(static_cast<int>(em.gdofs.size()));
  for (size_t j = 0; j < em.gdofs.size(); ++j) sel(j) = g(em.gdofs[j]);
  return em.B * sel;
}

BrokenField ConformingSpace::to_broken(const Eigen::VectorXd& g,
                                       int num_mesh_elements) const {
  BrokenField out;
  out.family = family_;
  out.q = q_;
  out.coef.assign(num_mesh_elements, Eigen::VectorXd());
  for (int k : elements_) out.coef[k] = local_coeffs(k, g);
  return out;
}

Eigen::MatrixXd ConformingSpace::gram() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(num_dofs_, num_dofs_);
  for (const auto& [k, em] : maps_) {
    const Eigen::MatrixXd G = em.B.transpose() * em.B;
    for (size_t a = 0; a < em.gdofs.size(); ++a)
      for (size_t b = 0; b < em.gdofs.size(); ++b)
        M(em.gdofs[a], em.gdofs[b]) += G(a, b);
  }
  return M;
}

Eigen::VectorXd ConformingSpace::load_from_broken(const BrokenField& target) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(num_dofs_);
  for (const auto& [k, em] : maps_) {
    if (target.coef[k].size() == 0) continue;
    const Eigen::VectorXd lb = em.B.transpose() * target.coef[k];
    for (size_t a = 0; a < em.gdofs.size(); ++a) b(em.gdofs[a]) += lb(a);
  }
  return b;
}

void ConformingSpace::scatter_rows(int element, const Eigen::MatrixXd& local_rows,
                                   Eigen::MatrixXd& global_rows,
                                   int row_offset) const {
  const ElementMap& em = element_map(element);
  const Eigen::MatrixXd block = local_rows * em.B;
  for (size_t j = 0; j < em.gdofs.size(); ++j)
    global_rows.block(row_offset, em.gdofs[j], block.rows(), 1) += block.col(j);
}

std::vector<int> subdomain_boundary_faces(const TetMesh& mesh,
                                          const std::vector<int>& elements) {
  std::set<int> subset(elements.begin(), elements.end());
  std::map<int, int> count;
  for (int k : elements)
    for (int f : mesh.tet(k).faces) count[f]++;
  std::vector<int> out;
  for (const auto& [f, n] : count)
    if (n == 1) out.push_back(f);
  return out;
}

std::vector<int> patch_essential_faces(const TetMesh& mesh,
                                       const VertexPatch& patch) {
  std::vector<int> boundary = subdomain_boundary_faces(mesh, patch.elements);
  if (patch.cls != PatchClass::DirichletBoundary) return boundary;
  std::vector<int> out;
  for (int f : boundary)
    if (!std::binary_search(patch.dirichlet_faces.begin(),
                            patch.dirichlet_faces.end(), f))
      out.push_back(f);
  return out;
}

std::vector<int> neumann_faces(const TetMesh& mesh) {
  std::vector<int> out;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).tag == BoundaryTag::Neumann) out.push_back(f);
  return out;
}

}  // namespace cpj
