#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commuteproj/conforming.hpp"
#include "commuteproj/hdiv_proj.hpp"
#include "oracle_utils.hpp"

using namespace cpj;

namespace {

std::vector<int> all_elements(const TetMesh& mesh) {
  std::vector<int> all(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
  return all;
}

BrokenField random_conforming_rt(MeshContext& ctx, int p, std::mt19937_64& rng) {
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, all_elements(mesh), Family::RT, p,
                        neumann_faces(mesh));
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd dofs(space.dofs());
  for (int i = 0; i < dofs.size(); ++i) dofs(i) = g(rng);
  return space.to_broken(dofs, mesh.num_elements());
}

}  // namespace

TEST_CASE("elementwise step reproduces members and matches the dense oracle") {
  MeshContext ctx(reference_tet());
  PipelineConfig cfg;
  cfg.degree = 1;

  // Members of RT_p are reproduced (distance zero, constraint feasible).
  std::mt19937_64 rng(3);
  const BasisSet& rt = ctx.basis(0, Family::RT, 1);
  Eigen::VectorXd c(rt.size());
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int i = 0; i < c.size(); ++i) c(i) = uni(rng);
  BrokenField wfield;
  wfield.family = Family::RT;
  wfield.q = 1;
  wfield.coef = {c};
  FieldInput w;
  w.discrete = &wfield;
  const Eigen::VectorXd tau = phd_tau_element(ctx, w, 0, cfg);
  CHECK((tau - c).norm() <= 1e-11 * c.norm());

  // Constant field at degree 0.
  PipelineConfig cfg0;
  cfg0.degree = 0;
  BrokenField cf;
  cf.family = Family::RT;
  cf.q = 0;
  cf.coef = {coefficients_in_basis(
      ctx.basis(0, Family::RT, 0),
      VPoly::constant(element_frame(ctx.mesh(), 0), Eigen::Vector3d(1, 0, 0)),
      ctx.tet_rule(0, 2), true)};
  FieldInput wc;
  wc.discrete = &cf;
  CHECK((phd_tau_element(ctx, wc, 0, cfg0) - cf.coef[0]).norm() <= 1e-12);
}

TEST_CASE("divergence-constrained distance matches the pseudo-inverse oracle") {
  // w = (y^2, 0, 0) at p = 1 on the reference tet: div tau = 0 and the
  // distance agrees with the dense KKT oracle.
  MeshContext ctx(reference_tet());
  PipelineConfig cfg;
  cfg.degree = 1;
  const Frame frame = element_frame(ctx.mesh(), 0);
  VPoly wpoly(frame, 2);
  {
    const Poly y = Poly::affine(frame, 0.0, Eigen::Vector3d(0, 1, 0),
                                Eigen::Vector3d::Zero());
    wpoly[0] = y * y;
  }
  BrokenField wfield;
  wfield.family = Family::Pvec;
  wfield.q = 2;
  wfield.coef = {coefficients_in_basis(ctx.basis(0, Family::Pvec, 2), wpoly,
                                       ctx.tet_rule(0, 6), true)};
  FieldInput w;
  w.discrete = &wfield;
  const Eigen::VectorXd tau = phd_tau_element(ctx, w, 0, cfg);
  CHECK((ctx.div_matrix(0, 1) * tau).norm() <= 1e-11);

  const Eigen::VectorXd load = l2_project(ctx, 0, Family::RT, 1, wpoly);
  const Eigen::VectorXd oracle_x = oracle::pinv_kkt(
      Eigen::MatrixXd::Identity(15, 15), load, ctx.div_matrix(0, 1),
      Eigen::VectorXd::Zero(space_dimension(Family::P, 1)));
  CHECK((tau - oracle_x).norm() <= 1e-10 * (1.0 + oracle_x.norm()));

  // Distance values agree too.
  const double w2 = integrate(wpoly.dot(Eigen::Vector3d(1, 0, 0)) *
                                  wpoly.dot(Eigen::Vector3d(1, 0, 0)),
                              ctx.tet_rule(0, 6));
  const double dist = std::sqrt(std::max(0.0, w2 - 2 * load.dot(tau) + tau.squaredNorm()));
  const double dist_oracle =
      std::sqrt(std::max(0.0, w2 - 2 * load.dot(oracle_x) + oracle_x.squaredNorm()));
  CHECK(dist == doctest::Approx(dist_oracle).epsilon(1e-9));
}

TEST_CASE("zero input gives zero patch fields and zero projection") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 0;
  AnalyticVecField zero;
  zero.value = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  zero.divergence = nullptr;
  FieldInput w;
  w.analytic = &zero;
  const HdivProjection proj = phd_apply(ctx, w, cfg);
  CHECK(proj.sigma.l2_norm() <= 1e-13);
  for (const auto& pf : proj.sigma_a)
    for (const auto& c : pf.coef) CHECK(c.norm() <= 1e-13);
}

TEST_CASE("patch divergence constraint holds elementwise") {
  std::mt19937_64 rng(17);
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  const BrokenField wb = random_conforming_rt(ctx, 1, rng);
  FieldInput w;
  w.discrete = &wb;
  BrokenField tau;
  tau.family = Family::RT;
  tau.q = 1;
  tau.coef.resize(ctx.mesh().num_elements());
  for (int k = 0; k < ctx.mesh().num_elements(); ++k)
    tau.coef[k] = phd_tau_element(ctx, w, k, cfg);
  const VertexPatch patch = ctx.mesh().vertex_patch(0);
  const PatchField sigma = phd_sigma_patch(ctx, patch, tau, w, cfg);
  for (size_t i = 0; i < sigma.elements.size(); ++i) {
    const int k = sigma.elements[i];
    const Eigen::VectorXd lhs = ctx.div_matrix(k, 1) * sigma.coef[i];
    const Eigen::VectorXd rhs = hat_divergence_rhs(ctx, w, k, 0, 1, cfg, true);
    CHECK((lhs - rhs).norm() <= 1e-11 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("projection property on conforming inputs") {
  std::mt19937_64 rng(23);
  for (BoundaryTag tag : {BoundaryTag::Dirichlet, BoundaryTag::Neumann}) {
    MeshContext ctx(cube_kuhn(0, tag));
    for (int p : {0, 1}) {
      PipelineConfig cfg;
      cfg.degree = p;
      const BrokenField wb = random_conforming_rt(ctx, p, rng);
      FieldInput w;
      w.discrete = &wb;
      const HdivProjection proj = phd_apply(ctx, w, cfg);
      double diff2 = 0.0;
      for (int k = 0; k < ctx.mesh().num_elements(); ++k)
        diff2 += (proj.sigma.coef[k] - wb.coef[k]).squaredNorm();
      CHECK(std::sqrt(diff2) <= 1e-10 * wb.l2_norm());
      for (const auto& c : proj.checks) CHECK(c.passed);
    }
  }
}

TEST_CASE("commuting property for analytic data") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 1;
  AnalyticVecField w;
  w.value = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(x(1)), 0.0, 0.0);
  };
  w.divergence = nullptr;  // exactly divergence-free
  FieldInput input;
  input.analytic = &w;
  const HdivProjection proj = phd_apply(ctx, input, cfg);
  for (const auto& c : proj.checks) CHECK(c.passed);
  // div sigma = Pi(div w) = 0 here.
  const BrokenField div = broken_div(ctx, proj.sigma);
  CHECK(div.l2_norm() <= 1e-10 * (1.0 + proj.sigma.l2_norm()));

  // A field with nonzero divergence.
  AnalyticVecField w2;
  w2.value = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(x(0) * x(0), x(0) * x(1), x(2));
  };
  w2.divergence = [](const Eigen::Vector3d& x) { return 3.0 * x(0) + 1.0; };
  FieldInput input2;
  input2.analytic = &w2;
  const HdivProjection proj2 = phd_apply(ctx, input2, cfg);
  const BrokenField div2 = broken_div(ctx, proj2.sigma);
  for (int k = 0; k < ctx.mesh().num_elements(); ++k) {
    const Eigen::VectorXd rhs =
        l2_project_scalar(ctx, k, 1, w2.divergence, cfg.analytic_quad(1));
    CHECK((div2.coef[k] - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("alternative variant requires degree >= 1") {
  MeshContext ctx(cube_kuhn());
  PipelineConfig cfg;
  cfg.degree = 0;
  cfg.variant = Variant::Alternative;
  AnalyticVecField zero;
  zero.value = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  FieldInput w;
  w.analytic = &zero;
  CHECK_THROWS_AS(phd_apply(ctx, w, cfg), std::invalid_argument);
}
