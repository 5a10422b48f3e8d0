#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commuteproj/fields.hpp"
#include "commuteproj/globalbest.hpp"
#include "oracle_utils.hpp"

using namespace cpj;

namespace {

std::vector<int> all_elements(const TetMesh& mesh) {
  std::vector<int> all(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
  return all;
}

BrokenField random_conforming(MeshContext& ctx, Family f, int p,
                              std::mt19937_64& rng) {
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, all_elements(mesh), f, p, neumann_faces(mesh));
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd dofs(space.dofs());
  for (int i = 0; i < dofs.size(); ++i) dofs(i) = g(rng);
  return space.to_broken(dofs, mesh.num_elements());
}

}  // namespace

TEST_CASE("conforming inputs give zero minimum and identical minimizer") {
  std::mt19937_64 rng(3);
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const BrokenField vb = random_conforming(ctx, Family::ND, 1, rng);
  FieldInput v;
  v.discrete = &vb;
  const GlobalBestResult best = global_unconstrained_best(ctx, v, 1, cfg);
  CHECK(best.value2 <= 1e-18 * vb.l2_norm() * vb.l2_norm() + 1e-20);
  double diff2 = 0.0;
  for (int k = 0; k < ctx.mesh().num_elements(); ++k)
    diff2 += (best.broken.coef[k] - vb.coef[k]).squaredNorm();
  CHECK(std::sqrt(diff2) <= 1e-9 * vb.l2_norm());
}

TEST_CASE("single element without boundary conditions: global equals local") {
  MeshContext ctx(reference_tet());
  PipelineConfig cfg;
  cfg.degree = 1;
  const NamedField f = make_field("trig", 1);
  FieldInput v;
  v.analytic = &f.field;
  const GlobalBestResult best = global_unconstrained_best(ctx, v, 1, cfg);
  const LocalBestReport local = localbest_sum(ctx, v, 1, cfg);
  CHECK(best.value2 >= local.localbest2_sum - 1e-12);

  // With one element and no essential faces, the conforming space is the
  // whole local space: the global minimizer solves the same weighted
  // normal equations elementwise.
  const int qd = cfg.analytic_quad(1);
  const int dim = space_dimension(Family::ND, 1);
  const Eigen::MatrixXd& C = ctx.curl_matrix(0, 1);
  const double h = ctx.mesh().tet(0).diameter;
  const double w = h / 2.0 * h / 2.0;
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(dim, dim) + w * (C.transpose() * C);
  const Eigen::VectorXd b =
      l2_project(ctx, 0, Family::ND, 1, f.field.value, qd) +
      w * C.transpose() * l2_project(ctx, 0, Family::RT, 1, f.field.curl, qd);
  const Eigen::VectorXd direct = A.llt().solve(b);
  CHECK((best.broken.coef[0] - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
}

TEST_CASE("three-field agreement with essential boundary conditions") {
  // Pure-Neumann tags make the pressure multiplier defined only up to a
  // constant; the min-norm saddle solve must still match the projection.
  MeshContext ctx(cube_kuhn(0, BoundaryTag::Neumann));
  PipelineConfig cfg;
  cfg.degree = 1;
  cfg.quad_degree = 18;
  const NamedField f = make_field("trigN", 1);
  FieldInput v;
  v.analytic = &f.field;
  AnalyticVecField wf;
  wf.value = f.field.curl;
  FieldInput w;
  w.analytic = &wf;
  const GlobalBestResult a = mixed_pi_div(ctx, w, 1, cfg);
  const GlobalBestResult b = mixed_three_field(ctx, v, 1, cfg);
  double diff2 = 0.0, norm2 = 0.0;
  for (int k = 0; k < ctx.mesh().num_elements(); ++k) {
    diff2 += (a.broken.coef[k] - b.broken.coef[k]).squaredNorm();
    norm2 += a.broken.coef[k].squaredNorm();
  }
  CHECK(std::sqrt(diff2) <= 1e-9 * std::max(1.0, std::sqrt(norm2)));
}

TEST_CASE("m^2 dominates the local-best sum") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 0;
  const NamedField f = make_field("trig", 1);
  FieldInput v;
  v.analytic = &f.field;
  const GlobalBestResult best = global_unconstrained_best(ctx, v, 0, cfg);
  const LocalBestReport local = localbest_sum(ctx, v, 0, cfg);
  CHECK(best.value2 >= local.localbest2_sum * (1.0 - 1e-12));
}

TEST_CASE("constrained minimum: feasible conforming target gives zero") {
  std::mt19937_64 rng(7);
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const BrokenField vb = random_conforming(ctx, Family::ND, 1, rng);
  FieldInput v;
  v.discrete = &vb;
  const BrokenField target = broken_curl(ctx, vb);
  const GlobalBestResult best = global_constrained_best(ctx, v, 1, target, cfg);
  CHECK(best.value2 <= 1e-16 * vb.l2_norm() * vb.l2_norm() + 1e-20);
}

TEST_CASE("constrained minimum with zero target on a gradient field") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const NamedField f = make_field("grad", 1);
  FieldInput v;
  v.analytic = &f.field;
  const BrokenField zero = BrokenField::zeros(
      Family::RT, 1, ctx.mesh().num_elements(), space_dimension(Family::RT, 1));
  const GlobalBestResult best = global_constrained_best(ctx, v, 1, zero, cfg);
  const BrokenField curl = broken_curl(ctx, best.broken);
  CHECK(curl.l2_norm() <= 1e-10 * std::max(1.0, best.broken.l2_norm()));
}

TEST_CASE("divergence-free projection reproduces conforming targets") {
  std::mt19937_64 rng(11);
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  // A conforming divergence-free RT field: the curl of a conforming ND one.
  const BrokenField vb = random_conforming(ctx, Family::ND, 1, rng);
  const BrokenField wb = broken_curl(ctx, vb);
  FieldInput w;
  w.discrete = &wb;
  const GlobalBestResult proj = mixed_pi_div(ctx, w, 1, cfg);
  double diff2 = 0.0;
  for (int k = 0; k < ctx.mesh().num_elements(); ++k)
    diff2 += (proj.broken.coef[k] - wb.coef[k]).squaredNorm();
  CHECK(std::sqrt(diff2) <= 1e-9 * wb.l2_norm());
  const BrokenField div = broken_div(ctx, proj.broken);
  CHECK(div.l2_norm() <= 1e-11 * std::max(1.0, wb.l2_norm()));
}

TEST_CASE("three-field mixed system agrees with the constrained projection") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const NamedField f = make_field("trig", 1);
  FieldInput v;
  v.analytic = &f.field;
  AnalyticVecField wf;
  wf.value = f.field.curl;
  FieldInput w;
  w.analytic = &wf;
  const GlobalBestResult a = mixed_pi_div(ctx, w, 1, cfg);
  const GlobalBestResult b = mixed_three_field(ctx, v, 1, cfg);
  double diff2 = 0.0, norm2 = 0.0;
  for (int k = 0; k < ctx.mesh().num_elements(); ++k) {
    diff2 += (a.broken.coef[k] - b.broken.coef[k]).squaredNorm();
    norm2 += a.broken.coef[k].squaredNorm();
  }
  CHECK(std::sqrt(diff2) <= 1e-9 * std::sqrt(norm2));
}

TEST_CASE("local best vanishes on discrete members and oscillation on RT curls") {
  std::mt19937_64 rng(13);
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const BrokenField vb = random_conforming(ctx, Family::ND, 1, rng);
  FieldInput v;
  v.discrete = &vb;
  const LocalBestReport rep = localbest_sum(ctx, v, 1, cfg);
  CHECK(rep.localbest2_sum <= 1e-18 * vb.l2_norm() * vb.l2_norm() + 1e-22);
  CHECK(rep.osc2_sum <= 1e-18 * vb.l2_norm() * vb.l2_norm() + 1e-22);
}

TEST_CASE("equivalence report: ratios at least one and the zero convention") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const NamedField f = make_field("trig", 1);
  FieldInput v;
  v.analytic = &f.field;
  const EquivReport rep = equivalence_report(ctx, v, 1, cfg);
  CHECK(rep.ratio_constrained >= 1.0 - 1e-9);
  CHECK(rep.ratio_unconstrained >= 1.0 - 1e-9);
  CHECK(rep.ratio_probust > 0.0);

  std::mt19937_64 rng(17);
  const BrokenField vb = random_conforming(ctx, Family::ND, 1, rng);
  FieldInput vd;
  vd.discrete = &vb;
  const EquivReport rep0 = equivalence_report(ctx, vd, 1, cfg);
  CHECK(rep0.ratio_constrained == doctest::Approx(1.0));
  CHECK(rep0.ratio_unconstrained == doctest::Approx(1.0));
}
