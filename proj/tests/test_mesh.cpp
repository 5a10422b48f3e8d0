#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "commuteproj/mesh.hpp"
#include "commuteproj/quadrature.hpp"

using namespace cpj;

TEST_CASE("reference tet counts and tags") {
  const TetMesh mesh = reference_tet();
  CHECK(mesh.num_elements() == 1);
  CHECK(mesh.num_faces() == 4);
  CHECK(mesh.num_edges() == 6);
  for (int f = 0; f < 4; ++f)
    CHECK(mesh.face(f).tag == BoundaryTag::Dirichlet);
}

TEST_CASE("Kuhn cube: counts and conformity") {
  const TetMesh mesh = cube_kuhn();
  CHECK(mesh.num_elements() == 6);
  CHECK(mesh.num_vertices() == 8);
  double vol = 0.0;
  for (int k = 0; k < 6; ++k) vol += mesh.tet(k).volume;
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hanging vertex is rejected as non-conforming") {
  // Second tet attaches to the midpoint of an edge of the first.
  std::vector<Eigen::Vector3d> nodes = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0, 0}, {0, -1, 0.2}};
  std::vector<std::array<int, 4>> tets = {{0, 1, 2, 3}, {4, 5, 1, 3}};
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags;
  CHECK_THROWS_WITH_AS(TetMesh(nodes, tets, tags),
                       doctest::Contains("non-conforming"), std::runtime_error);
}

TEST_CASE("inverted and degenerate tets are rejected") {
  std::vector<Eigen::Vector3d> nodes = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags = {
      {{1, 2, 3}, BoundaryTag::Dirichlet},
      {{0, 2, 3}, BoundaryTag::Dirichlet},
      {{0, 1, 3}, BoundaryTag::Dirichlet},
      {{0, 1, 2}, BoundaryTag::Dirichlet}};
  CHECK_THROWS_WITH_AS(TetMesh(nodes, {{0, 2, 1, 3}}, tags),
                       doctest::Contains("inverted"), std::runtime_error);
  std::vector<Eigen::Vector3d> flat = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
  CHECK_THROWS(TetMesh(flat, {{0, 1, 3, 2}}, tags));
}

TEST_CASE("boundary tag bookkeeping") {
  std::vector<Eigen::Vector3d> nodes = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  // Missing one face.
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> partial = {
      {{1, 2, 3}, BoundaryTag::Dirichlet},
      {{0, 2, 3}, BoundaryTag::Dirichlet},
      {{0, 1, 3}, BoundaryTag::Dirichlet}};
  CHECK_THROWS_WITH_AS(TetMesh(nodes, {{0, 1, 2, 3}}, partial),
                       doctest::Contains("untagged"), std::runtime_error);
}

TEST_CASE("shape regularity: regular tetrahedron gives sqrt(6)") {
  // Regular tet with edge sqrt(2): oracle r = 3V/A with V, A by hand.
  std::vector<Eigen::Vector3d> nodes = {
      {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 0}};
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags;
  for (const auto f :
       {std::array<int, 3>{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}})
    tags.push_back({f, BoundaryTag::Dirichlet});
  std::vector<std::array<int, 4>> tets = {{0, 1, 2, 3}};
  const double v6 = (nodes[1] - nodes[0])
                        .cross(nodes[2] - nodes[0])
                        .dot(nodes[3] - nodes[0]);
  if (v6 < 0) std::swap(tets[0][2], tets[0][3]);
  const TetMesh mesh(nodes, tets, tags);
  CHECK(mesh.shape_regularity() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-13));
}

TEST_CASE("shape regularity: reference tet") {
  const TetMesh mesh = reference_tet();
  // r = 3V/A with V = 1/6 and A = 3/2 + sqrt(3)/2; h = sqrt(2).
  const double r = 3.0 * (1.0 / 6.0) / (1.5 + std::sqrt(3.0) / 2.0);
  const double expected = std::sqrt(2.0) / (2.0 * r);
  CHECK(mesh.shape_regularity() == doctest::Approx(expected).epsilon(1e-13));
  // Same value in closed form: sqrt(2) (3 + sqrt(3)) / 2 ~ 3.346.
  CHECK(expected ==
        doctest::Approx(std::sqrt(2.0) * (3.0 + std::sqrt(3.0)) / 2.0)
            .epsilon(1e-12));
}

TEST_CASE("red refinement counts and inherited tags") {
  const TetMesh one = reference_tet();
  const TetMesh eight = one.uniform_refine();
  CHECK(eight.num_elements() == 8);

  const TetMesh cube1 = cube_kuhn(1);
  CHECK(cube1.num_elements() == 48);
  CHECK(cube1.num_vertices() == 27);
  int bfaces = 0;
  for (int f = 0; f < cube1.num_faces(); ++f)
    if (cube1.face(f).tag != BoundaryTag::Interior) ++bfaces;
  CHECK(bfaces == 48);
}

TEST_CASE("refinement keeps the shape regularity bounded") {
  TetMesh mesh = cube_kuhn();
  const double kappa0 = mesh.shape_regularity();
  double h = mesh.max_diameter();
  for (int r = 0; r < 3; ++r) {
    mesh = mesh.uniform_refine();
    const double kappa = mesh.shape_regularity();
    CHECK(kappa <= 2.0 * kappa0);
    CHECK(kappa0 <= 2.0 * kappa);
    // Kuhn meshes refine self-similarly: kappa exactly preserved, h halved.
    CHECK(kappa == doctest::Approx(kappa0).epsilon(1e-12));
    CHECK(mesh.max_diameter() == doctest::Approx(0.5 * h).epsilon(1e-12));
    h = mesh.max_diameter();
  }
}

TEST_CASE("hat functions: nodal values and partition of unity") {
  const TetMesh mesh = cube_kuhn(1);
  for (int k : {0, 7, 23}) {
    const auto& tv = mesh.tet(k).v;
    for (int lv = 0; lv < 4; ++lv) {
      const auto [val, grad] = mesh.hat_eval(tv[lv], k, mesh.node(tv[lv]));
      CHECK(val == doctest::Approx(1.0).epsilon(1e-13));
      for (int lw = 0; lw < 4; ++lw) {
        if (lw == lv) continue;
        const auto [zero, g2] = mesh.hat_eval(tv[lv], k, mesh.node(tv[lw]));
        (void)g2;
        CHECK(std::abs(zero) <= 1e-13);
      }
      (void)grad;
    }
    const auto& t = mesh.tet(k);
    const QuadRule rule =
        tet_rule(mesh.node(t.v[0]), mesh.node(t.v[1]), mesh.node(t.v[2]),
                 mesh.node(t.v[3]), 4);
    for (int i = 0; i < rule.size(); ++i) {
      double sum = 0.0;
      for (int lv = 0; lv < 4; ++lv)
        sum += mesh.hat_eval(t.v[lv], k, rule.point(i)).first;
      CHECK(std::abs(sum - 1.0) <= 1e-13);
    }
  }
  CHECK_THROWS(mesh.hat_eval(0, mesh.num_elements() - 1, Eigen::Vector3d(1, 1, 1)));
}

TEST_CASE("every element appears in exactly 4 vertex patches") {
  const TetMesh mesh = cube_kuhn(1);
  std::vector<int> count(mesh.num_elements(), 0);
  for (int a = 0; a < mesh.num_vertices(); ++a)
    for (int k : mesh.vertex_patch(a).elements) ++count[k];
  for (int k = 0; k < mesh.num_elements(); ++k) CHECK(count[k] == 4);
}

TEST_CASE("patch classification") {
  const TetMesh meshD = cube_kuhn(1);
  const TetMesh meshN = cube_kuhn(1, BoundaryTag::Neumann);
  int interior = 0;
  for (int a = 0; a < meshD.num_vertices(); ++a) {
    const VertexPatch pd = meshD.vertex_patch(a);
    const VertexPatch pn = meshN.vertex_patch(a);
    if (pd.cls == PatchClass::Interior) {
      ++interior;
      CHECK(pn.cls == PatchClass::Interior);
    } else {
      CHECK(pd.cls == PatchClass::DirichletBoundary);
      CHECK(!pd.dirichlet_faces.empty());
      CHECK(pn.cls == PatchClass::NeumannBoundary);
      CHECK(pn.dirichlet_faces.empty());
    }
  }
  CHECK(interior == 1);  // only the cube center at refined=1
}

TEST_CASE("mesh file round trip") {
  std::ostringstream os;
  os << "$nodes 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n$tets 1\n0 1 2 3\n"
     << "$bfaces 4\n1 2 3 D\n0 2 3 N\n0 1 3 D\n0 1 2 D\n";
  std::istringstream is(os.str());
  const TetMesh mesh = read_mesh(is);
  CHECK(mesh.num_elements() == 1);
  int neumann = 0;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).tag == BoundaryTag::Neumann) ++neumann;
  CHECK(neumann == 1);
  // Mixed tags: every vertex touches the Neumann face except vertex 1?
  // Vertex classification: vertices of the N face that also touch D faces
  // are Dirichlet-class.
  CHECK(mesh.vertex_patch(0).cls == PatchClass::DirichletBoundary);
}

TEST_CASE("generator strings") {
  CHECK(make_mesh("reftet").num_elements() == 1);
  CHECK(make_mesh("cube-kuhn").num_elements() == 6);
  CHECK(make_mesh("cube-kuhn:refined=1").num_elements() == 48);
  const TetMesh n = make_mesh("cube-kuhn:refined=1:bc=N");
  CHECK(n.has_tag(BoundaryTag::Neumann));
  CHECK(!n.has_tag(BoundaryTag::Dirichlet));
}
