#include "commuteproj/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cpj {

namespace {

std::array<int, 3> sorted3(std::array<int, 3> f) {
  std::sort(f.begin(), f.end());
  return f;
}

double signed_volume6(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
  return (b - a).cross(c - a).dot(d - a);
}

}  // namespace

TetMesh::TetMesh(std::vector<Eigen::Vector3d> nodes,
                 std::vector<std::array<int, 4>> tets,
                 const std::vector<std::pair<std::array<int, 3>, BoundaryTag>>&
                     boundary_face_tags)
    : nodes_(std::move(nodes)) {
  tets_.reserve(tets.size());
  for (auto& t : tets) {
    for (int v : t)
      if (v < 0 || v >= num_vertices())
        throw std::runtime_error("mesh: tet references invalid node");
    Tet tet;
    tet.v = t;
    tet.vref = t;
    std::sort(tet.v.begin(), tet.v.end());
    if (tet.v[0] == tet.v[1] || tet.v[1] == tet.v[2] || tet.v[2] == tet.v[3])
      throw std::runtime_error("mesh: tet with repeated vertex");
    const double vol6 = signed_volume6(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]],
                                       nodes_[t[3]]);
    double h = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        h = std::max(h, (nodes_[tet.v[i]] - nodes_[tet.v[j]]).norm());
    if (vol6 <= 0.0)
      throw std::runtime_error("mesh: inverted (non-positive volume) tet");
    if (vol6 / 6.0 <= 1e-14 * h * h * h)
      throw std::runtime_error("mesh: degenerate (zero-volume) tet");
    tet.volume = vol6 / 6.0;
    tet.diameter = h;
    tet.centroid = 0.25 * (nodes_[tet.v[0]] + nodes_[tet.v[1]] +
                           nodes_[tet.v[2]] + nodes_[tet.v[3]]);
    tets_.push_back(tet);
  }
  build_topology(boundary_face_tags);
}

void TetMesh::build_topology(
    const std::vector<std::pair<std::array<int, 3>, BoundaryTag>>& tags) {
  // Hanging-vertex guard first: no vertex may lie inside a foreign element's
  // closure (interior, face, or edge).
  for (int k = 0; k < num_elements(); ++k) {
    const auto& tv = tets_[k].v;
    const Eigen::Vector3d p0 = nodes_[tv[0]];
    Eigen::Matrix3d T;
    T.col(0) = nodes_[tv[1]] - p0;
    T.col(1) = nodes_[tv[2]] - p0;
    T.col(2) = nodes_[tv[3]] - p0;
    const Eigen::Matrix3d Tinv = T.inverse();
    for (int v = 0; v < num_vertices(); ++v) {
      if (v == tv[0] || v == tv[1] || v == tv[2] || v == tv[3]) continue;
      const Eigen::Vector3d lam = Tinv * (nodes_[v] - p0);
      const double l0 = 1.0 - lam.sum();
      const double tol = 1e-12;
      if (lam.minCoeff() >= -tol && l0 >= -tol)
        throw std::runtime_error(
            "mesh: non-conforming (vertex " + std::to_string(v) +
            " lies on element " + std::to_string(k) + ")");
    }
  }

  // Faces and edges keyed by ascending vertex tuples; ids assigned in sorted
  // key order so the numbering does not depend on element order.
  std::map<std::array<int, 3>, std::array<int, 2>> face_elems;
  std::set<std::array<int, 2>> edge_keys;
  static const int local_faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  static const int local_edges[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                        {1, 2}, {1, 3}, {2, 3}};
  for (int k = 0; k < num_elements(); ++k) {
    const auto& tv = tets_[k].v;
    for (const auto& lf : local_faces) {
      std::array<int, 3> key = {tv[lf[0]], tv[lf[1]], tv[lf[2]]};
      auto [it, fresh] = face_elems.try_emplace(key, std::array<int, 2>{k, -1});
      if (!fresh) {
        if (it->second[1] != -1)
          throw std::runtime_error("mesh: non-conforming (face in >2 tets)");
        it->second[1] = k;
      }
    }
    for (const auto& le : local_edges)
      edge_keys.insert({tv[le[0]], tv[le[1]]});
  }

  std::map<std::array<int, 3>, BoundaryTag> tag_map;
  for (const auto& [f, t] : tags) {
    if (t == BoundaryTag::Interior)
      throw std::runtime_error("mesh: boundary face tagged Interior");
    if (!tag_map.emplace(sorted3(f), t).second)
      throw std::runtime_error("mesh: duplicate boundary face tag");
  }

  faces_.reserve(face_elems.size());
  std::map<std::array<int, 3>, int> face_ids;
  for (const auto& [key, elems] : face_elems) {
    Face f;
    f.v = key;
    f.elements = elems;
    const Eigen::Vector3d a = nodes_[key[0]], b = nodes_[key[1]],
                          c = nodes_[key[2]];
    f.normal = (b - a).cross(c - a).normalized();
    if (elems[1] == -1) {
      auto it = tag_map.find(key);
      if (it == tag_map.end())
        throw std::runtime_error("mesh: untagged boundary face");
      f.tag = it->second;
      tag_map.erase(it);
    }
    face_ids.emplace(key, static_cast<int>(faces_.size()));
    faces_.push_back(f);
  }
  if (!tag_map.empty())
    throw std::runtime_error("mesh: tag given for a non-boundary face");

  edges_.reserve(edge_keys.size());
  std::map<std::array<int, 2>, int> edge_ids;
  for (const auto& key : edge_keys) {
    edge_ids.emplace(key, static_cast<int>(edges_.size()));
    edges_.push_back(Edge{key});
  }

  for (int k = 0; k < num_elements(); ++k) {
    auto& tet = tets_[k];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key;
      int p = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) key[p++] = tet.v[j];
      tet.faces[i] = face_ids.at(key);
    }
    for (int e = 0; e < 6; ++e)
      tet.edges[e] = edge_ids.at({tet.v[local_edges[e][0]], tet.v[local_edges[e][1]]});
    double area = 0.0;
    for (int f : tet.faces) {
      const auto& fv = faces_[f].v;
      area += 0.5 * (nodes_[fv[1]] - nodes_[fv[0]])
                        .cross(nodes_[fv[2]] - nodes_[fv[0]])
                        .norm();
    }
    tet.insphere_diameter = 2.0 * (3.0 * tet.volume / area);
  }

  vertex_elements_.assign(num_vertices(), {});
  for (int k = 0; k < num_elements(); ++k)
    for (int v : tets_[k].v) vertex_elements_[v].push_back(k);
  for (auto& ve : vertex_elements_) std::sort(ve.begin(), ve.end());

}

double TetMesh::shape_regularity() const {
  double kappa = 0.0;
  for (const auto& t : tets_)
    kappa = std::max(kappa, t.diameter / t.insphere_diameter);
  return kappa;
}

double TetMesh::max_diameter() const {
  double h = 0.0;
  for (const auto& t : tets_) h = std::max(h, t.diameter);
  return h;
}

VertexPatch TetMesh::vertex_patch(int vertex) const {
  if (vertex < 0 || vertex >= num_vertices())
    throw std::runtime_error("vertex_patch: no such vertex");
  VertexPatch p;
  p.vertex = vertex;
  p.elements = vertex_elements_[vertex];

  bool on_boundary = false;
  for (int k : p.elements)
    for (int f : tets_[k].faces) {
      const Face& face = faces_[f];
      if (face.tag == BoundaryTag::Interior) continue;
      if (std::find(face.v.begin(), face.v.end(), vertex) == face.v.end())
        continue;
      on_boundary = true;
      if (face.tag == BoundaryTag::Dirichlet) p.dirichlet_faces.push_back(f);
    }
  std::sort(p.dirichlet_faces.begin(), p.dirichlet_faces.end());
  p.dirichlet_faces.erase(
      std::unique(p.dirichlet_faces.begin(), p.dirichlet_faces.end()),
      p.dirichlet_faces.end());
  if (!on_boundary)
    p.cls = PatchClass::Interior;
  else
    p.cls = p.dirichlet_faces.empty() ? PatchClass::NeumannBoundary
                                      : PatchClass::DirichletBoundary;

  std::set<int> verts;
  for (int k : p.elements)
    for (int v : tets_[k].v) verts.insert(v);
  for (int a : verts)
    for (int b : verts)
      p.diameter = std::max(p.diameter, (nodes_[a] - nodes_[b]).norm());
  return p;
}

Eigen::Vector3d TetMesh::barycentric_gradient(int element, int lv) const {
  const auto& tv = tets_[element].v;
  Eigen::Matrix3d T;
  T.col(0) = nodes_[tv[1]] - nodes_[tv[0]];
  T.col(1) = nodes_[tv[2]] - nodes_[tv[0]];
  T.col(2) = nodes_[tv[3]] - nodes_[tv[0]];
  const Eigen::Matrix3d Tinv = T.inverse();
  if (lv == 0) return -(Tinv.row(0) + Tinv.row(1) + Tinv.row(2)).transpose();
  return Tinv.row(lv - 1).transpose();
}

std::pair<double, Eigen::Vector3d> TetMesh::hat_eval(
    int vertex, int element, const Eigen::Vector3d& x) const {
  const auto& tv = tets_[element].v;
  const auto it = std::find(tv.begin(), tv.end(), vertex);
  if (it == tv.end())
    throw std::runtime_error("hat_eval: element not in the vertex patch");
  const int lv = static_cast<int>(it - tv.begin());
  const Eigen::Vector3d g = barycentric_gradient(element, lv);
  const double val = 1.0 + g.dot(x - nodes_[vertex]);
  return {val, g};
}

TetMesh TetMesh::uniform_refine() const {
  std::vector<Eigen::Vector3d> nodes = nodes_;
  // Midpoint ids follow the (deterministic) edge numbering.
  std::vector<int> mid(num_edges());
  for (int e = 0; e < num_edges(); ++e) {
    mid[e] = static_cast<int>(nodes.size());
    nodes.push_back(0.5 * (nodes_[edges_[e].v[0]] + nodes_[edges_[e].v[1]]));
  }

  // Swapping positions 0 and 2 flips the orientation while mapping the
  // diagonal pair {m(t0,t2), m(t1,t3)} of every later refinement to itself,
  // so the similarity classes are preserved.
  auto oriented = [&nodes](std::array<int, 4> t) {
    if (signed_volume6(nodes[t[0]], nodes[t[1]], nodes[t[2]], nodes[t[3]]) < 0)
      std::swap(t[0], t[2]);
    return t;
  };

  std::vector<std::array<int, 4>> children;
  children.reserve(8 * num_elements());
  for (const auto& t : tets_) {
    // Bey's red refinement on the refinement-order tuple: four corner tets
    // and four inner tets around the diagonal m02-m13; at most three
    // similarity classes arise, and Kuhn-type meshes refine self-similarly.
    const int v0 = t.vref[0], v1 = t.vref[1], v2 = t.vref[2], v3 = t.vref[3];
    auto m = [&](int a, int b) {
      std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
      for (int le = 0; le < 6; ++le) {
        const Edge& e = edges_[t.edges[le]];
        if (e.v == key) return mid[t.edges[le]];
      }
      throw std::logic_error("refine: missing midpoint");
    };
    const int m01 = m(v0, v1), m02 = m(v0, v2), m03 = m(v0, v3);
    const int m12 = m(v1, v2), m13 = m(v1, v3), m23 = m(v2, v3);
    children.push_back(oriented({v0, m01, m02, m03}));
    children.push_back(oriented({m01, v1, m12, m13}));
    children.push_back(oriented({m02, m12, v2, m23}));
    children.push_back(oriented({m03, m13, m23, v3}));
    children.push_back(oriented({m01, m02, m03, m13}));
    children.push_back(oriented({m01, m02, m12, m13}));
    children.push_back(oriented({m02, m03, m13, m23}));
    children.push_back(oriented({m02, m12, m13, m23}));
  }

  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags;
  for (const auto& f : faces_) {
    if (f.tag == BoundaryTag::Interior) continue;
    const int a = f.v[0], b = f.v[1], c = f.v[2];
    auto emid = [&](int x, int y) {
      std::array<int, 2> key = {std::min(x, y), std::max(x, y)};
      for (int e = 0; e < num_edges(); ++e)
        if (edges_[e].v == key) return mid[e];
      throw std::logic_error("refine: missing edge");
    };
    const int mab = emid(a, b), mac = emid(a, c), mbc = emid(b, c);
    tags.push_back({{a, mab, mac}, f.tag});
    tags.push_back({{b, mab, mbc}, f.tag});
    tags.push_back({{c, mac, mbc}, f.tag});
    tags.push_back({{mab, mac, mbc}, f.tag});
  }
  return TetMesh(std::move(nodes), std::move(children), tags);
}

bool TetMesh::has_tag(BoundaryTag t) const {
  for (const auto& f : faces_)
    if (f.tag == t) return true;
  return false;
}

namespace {

TetMesh with_uniform_boundary_tag(std::vector<Eigen::Vector3d> nodes,
                                  std::vector<std::array<int, 4>> tets,
                                  BoundaryTag tag) {
  std::map<std::array<int, 3>, int> count;
  static const int lf[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& t : tets)
    for (const auto& f : lf)
      count[sorted3({t[f[0]], t[f[1]], t[f[2]]})]++;
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags;
  for (const auto& [key, n] : count)
    if (n == 1) tags.push_back({key, tag});
  return TetMesh(std::move(nodes), std::move(tets), tags);
}

}  // namespace

TetMesh reference_tet(BoundaryTag tag) {
  std::vector<Eigen::Vector3d> nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  return with_uniform_boundary_tag(std::move(nodes), {{0, 1, 2, 3}}, tag);
}

TetMesh cube_kuhn(int refinements, BoundaryTag tag) {
  std::vector<Eigen::Vector3d> nodes;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) nodes.push_back({double(i), double(j), double(k)});
  auto id = [](int i, int j, int k) { return i + 2 * j + 4 * k; };
  // Six tets along vertex-id-increasing paths 0 -> 7 (Kuhn subdivision).
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> tets;
  for (const auto& p : perms) {
    std::array<int, 4> t;
    t[0] = id(0, 0, 0);
    int coord[3] = {0, 0, 0};
    for (int s = 0; s < 3; ++s) {
      coord[p[s]] = 1;
      t[s + 1] = id(coord[0], coord[1], coord[2]);
    }
    // The 0<->2 swap fixes the orientation without moving Bey's diagonal,
    // so refinement reproduces the Kuhn pattern self-similarly.
    if (signed_volume6(nodes[t[0]], nodes[t[1]], nodes[t[2]], nodes[t[3]]) < 0)
      std::swap(t[0], t[2]);
    tets.push_back(t);
  }
  TetMesh mesh = with_uniform_boundary_tag(std::move(nodes), std::move(tets), tag);
  for (int r = 0; r < refinements; ++r) mesh = mesh.uniform_refine();
  return mesh;
}

TetMesh read_mesh(std::istream& in) {
  std::string word;
  auto expect = [&](const std::string& key) {
    if (!(in >> word) || word != key)
      throw std::runtime_error("mesh file: expected '" + key + "'");
  };
  expect("$nodes");
  int n;
  in >> n;
  std::vector<Eigen::Vector3d> nodes(n);
  for (auto& p : nodes) in >> p(0) >> p(1) >> p(2);
  expect("$tets");
  int m;
  in >> m;
  std::vector<std::array<int, 4>> tets(m);
  for (auto& t : tets) in >> t[0] >> t[1] >> t[2] >> t[3];
  expect("$bfaces");
  int l;
  in >> l;
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags(l);
  for (auto& [f, t] : tags) {
    std::string tg;
    in >> f[0] >> f[1] >> f[2] >> tg;
    if (tg == "D")
      t = BoundaryTag::Dirichlet;
    else if (tg == "N")
      t = BoundaryTag::Neumann;
    else
      throw std::runtime_error("mesh file: boundary tag must be D or N");
  }
  if (!in) throw std::runtime_error("mesh file: parse error");
  return TetMesh(std::move(nodes), std::move(tets), tags);
}

TetMesh make_mesh(const std::string& spec) {
  std::string base = spec;
  int refined = 0;
  BoundaryTag tag = BoundaryTag::Dirichlet;
  // generator options: name[:refined=k][:bc=D|N]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (!parts.empty()) {
    base = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].rfind("refined=", 0) == 0)
        refined = std::stoi(parts[i].substr(8));
      else if (parts[i] == "bc=N")
        tag = BoundaryTag::Neumann;
      else if (parts[i] == "bc=D")
        tag = BoundaryTag::Dirichlet;
      else
        base = spec;  // unknown option: treat the whole spec as a filename
    }
  }
  if (base == "reftet") {
    TetMesh mesh = reference_tet(tag);
    for (int r = 0; r < refined; ++r) mesh = mesh.uniform_refine();
    return mesh;
  }
  if (base == "cube-kuhn") return cube_kuhn(refined, tag);
  std::ifstream file(spec);
  if (!file) throw std::runtime_error("cannot open mesh file '" + spec + "'");
  return read_mesh(file);
}

}  // namespace cpj
