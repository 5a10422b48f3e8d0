#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "commuteproj/harness.hpp"
#include "oracle_utils.hpp"

using namespace cpj;

TEST_CASE("rate estimation on exact geometric data") {
  CHECK(estimate_rate({1.0, 0.5, 0.25}, {1.0, 0.5, 0.25}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_rate({1.0, 0.25, 0.0625}, {1.0, 0.5, 0.25}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(estimate_rate({1.0, 0.0}, {1.0, 0.5}));
  CHECK_THROWS(estimate_rate({1.0}, {1.0}));
}

TEST_CASE("field library ids and the finite-difference curl guard") {
  for (const char* id : {"trig", "trigN", "grad", "gradtrig", "poly:2"}) {
    const NamedField f = make_field(id, 42);
    CHECK(curl_consistency_error(f.field, 42) <= 1e-6);
  }
  CHECK_THROWS(make_field("nope", 1));
  // A wrong curl callback is caught.
  AnalyticVecField bad;
  bad.value = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(x(1)), 0, 0);
  };
  bad.curl = [](const Eigen::Vector3d&) { return Eigen::Vector3d(1, 1, 1); };
  CHECK(curl_consistency_error(bad, 7) > 1e-3);
}

TEST_CASE("CSV output round trips all printed digits") {
  CsvTable t;
  t.columns = {"a", "b"};
  t.rows.push_back({format_double(1.0 / 3.0), format_double(2.55e-13)});
  t.rows.push_back({format_double(-7.125), format_double(3.0)});
  std::ostringstream os;
  t.write(os);
  // Parse back and re-format: identical strings.
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "a,b");
  for (const auto& row : t.rows) {
    std::getline(is, line);
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double y = std::stod(line.substr(comma + 1));
    CHECK(format_double(x) == row[0]);
    CHECK(format_double(y) == row[1]);
  }
}

TEST_CASE("single-tet experiment on a small degree range") {
  ExperimentConfig cfg;
  cfg.mesh_spec = "reftet";
  cfg.field_id = "trig";
  cfg.p_sweep_begin = 0;
  cfg.p_sweep_end = 2;
  const SingleTetReport rep = run_single_tet(cfg);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.ordered);
  for (const auto& r : rep.rows) {
    CHECK(r.constrained >= r.unconstrained - 1e-12);
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio <= 3.0);  // kappa-dependent constant, order one on K-hat
  }
}

TEST_CASE("commute experiment passes on a coarse mesh") {
  ExperimentConfig cfg;
  cfg.mesh_spec = "cube-kuhn";
  cfg.degree = 0;
  cfg.field_id = "poly:1";
  const CommuteReport rep = run_commute(cfg);
  CHECK(rep.pass);
  CHECK(!rep.checks.empty());
}

TEST_CASE("deterministic reruns are bit-identical") {
  ExperimentConfig cfg;
  cfg.mesh_spec = "cube-kuhn";
  cfg.degree = 0;
  cfg.field_id = "trig";
  const CommuteReport a = run_commute(cfg);
  const CommuteReport b = run_commute(cfg);
  CHECK(format_double(a.residual) == format_double(b.residual));

  std::ostringstream csva, csvb;
  a.csv.write(csva);
  b.csv.write(csvb);
  CHECK(csva.str() == csvb.str());
}

TEST_CASE("convergence reports exact when the field is already discrete") {
  // A global degree-1 polynomial is a conforming member of ND_1 on every
  // level: the weighted minimum vanishes and no rate is fitted.
  ExperimentConfig cfg;
  cfg.mesh_spec = "cube-kuhn";
  cfg.degree = 1;
  cfg.field_id = "poly:1";
  cfg.refine = 2;
  const ConvergenceReport rep = run_convergence(cfg);
  CHECK(rep.exact);
  CHECK(rep.pass);
}

TEST_CASE("single-tet sweep on a discrete member gives vanishing minima") {
  ExperimentConfig cfg;
  cfg.mesh_spec = "reftet";
  cfg.field_id = "poly:1";
  cfg.p_sweep_begin = 1;
  cfg.p_sweep_end = 2;
  const SingleTetReport rep = run_single_tet(cfg);
  for (const auto& r : rep.rows) {
    CHECK(r.constrained <= 1e-11);
    CHECK(r.unconstrained <= 1e-11);
    CHECK(r.oscillation <= 1e-11);
  }
}

TEST_CASE("patch convexity detection") {
  const TetMesh mesh = cube_kuhn();
  // The patch of vertex 0 (on the main diagonal) is the whole cube: convex.
  CHECK(patch_is_convex(mesh, mesh.vertex_patch(0)));
  // Every Kuhn-cube corner patch is an intersection of half spaces: convex.
  for (int a = 0; a < mesh.num_vertices(); ++a)
    CHECK(patch_is_convex(mesh, mesh.vertex_patch(a)));

  // Two tets meeting only at the origin: the star of that vertex is not
  // convex (the segment between opposite corners leaves the union).
  std::vector<Eigen::Vector3d> nodes = {{0, 0, 0}, {1, 0, 0},  {0, 1, 0},
                                        {0, 0, 1}, {-1, 0, 0}, {0, -1, 0},
                                        {0, 0, -1}};
  std::vector<std::array<int, 4>> tets = {{0, 1, 2, 3}, {0, 4, 6, 5}};
  std::vector<std::pair<std::array<int, 3>, BoundaryTag>> tags;
  static const int lf[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& t : tets)
    for (const auto& f : lf) {
      std::array<int, 3> key = {t[f[0]], t[f[1]], t[f[2]]};
      std::sort(key.begin(), key.end());
      tags.push_back({key, BoundaryTag::Dirichlet});
    }
  const TetMesh wedge(nodes, tets, tags);
  CHECK(!patch_is_convex(wedge, wedge.vertex_patch(0)));
  CHECK(patch_is_convex(wedge, wedge.vertex_patch(1)));
}

TEST_CASE("single-tet sweep on a random tet via a mesh file") {
  // Shape-regularity-only dependence of the equivalence constant: on a
  // random well-shaped tet the sweep stays ordered and bounded.
  std::mt19937_64 rng(73);
  const TetMesh tet = oracle::random_tet(rng, 6.0);
  const std::string path = "random_tet.mesh";
  {
    std::ofstream f(path);
    f << "$nodes 4\n";
    for (int v = 0; v < 4; ++v) {
      const Eigen::Vector3d& x = tet.node(v);
      f << format_double(x(0)) << " " << format_double(x(1)) << " "
        << format_double(x(2)) << "\n";
    }
    const auto& tv = tet.tet(0).vref;
    f << "$tets 1\n"
      << tv[0] << " " << tv[1] << " " << tv[2] << " " << tv[3] << "\n";
    f << "$bfaces 4\n";
    for (int fc = 0; fc < 4; ++fc) {
      const auto& fv = tet.face(fc).v;
      f << fv[0] << " " << fv[1] << " " << fv[2] << " D\n";
    }
  }
  ExperimentConfig cfg;
  cfg.mesh_spec = path;
  cfg.field_id = "trigmix";
  cfg.p_sweep_begin = 0;
  cfg.p_sweep_end = 4;
  const SingleTetReport rep = run_single_tet(cfg);
  CHECK(rep.ordered);
  for (const auto& r : rep.rows) {
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio < 50.0);
  }
}

TEST_CASE("p-sweep hypothesis warnings") {
  // Nonempty Gamma_D violates the degree-robust bound's hypotheses; the
  // sweep still runs but flags it.
  ExperimentConfig cfg;
  cfg.mesh_spec = "cube-kuhn";
  cfg.field_id = "trig";
  cfg.quad_degree = 14;
  cfg.p_sweep_begin = 1;
  cfg.p_sweep_end = 1;
  const EquivalenceRunReport rep = run_equivalence(cfg);
  CHECK(!rep.hypotheses_ok);
  CHECK(rep.hypotheses_note.find("Gamma_D") != std::string::npos);
}

TEST_CASE("mixed experiment on the coarse cube") {
  ExperimentConfig cfg;
  cfg.mesh_spec = "cube-kuhn";
  cfg.degree = 1;
  cfg.field_id = "trig";
  const MixedReport rep = run_mixed(cfg);
  CHECK(rep.pass);
}
