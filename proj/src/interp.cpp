#include "commuteproj/interp.hpp"

#include "commuteproj/context.hpp"

namespace cpj {

Eigen::VectorXd canonical_moments(MeshContext& ctx, const CanonicalSystem& sys,
                                  const VPoly& target) {
  Eigen::VectorXd m(static_cast<int>(sys.dofs.size()));
  for (const auto& blk : sys.blocks) {
    const int deg = sys.q + target.degree() + 1;
    const QuadRule& rule =
        blk.domain == DofDomain::Edge
            ? ctx.edge_rule(blk.entity, deg)
            : (blk.domain == DofDomain::Face ? ctx.face_rule(blk.entity, deg)
                                             : ctx.tet_rule(blk.entity, deg));
    const Eigen::MatrixXd tv = target.eval(rule.points);
    for (int i = blk.begin; i < blk.end; ++i) {
      const DofFunctional& dof = sys.dofs[i];
      const Eigen::VectorXd wv =
          dof.weight.eval(rule.points).cwiseProduct(rule.weights);
      m(i) = wv.dot(tv * dof.dir);
    }
  }
  return m;
}

Eigen::VectorXd canonical_interpolate(MeshContext& ctx, int element, Family f,
                                      int q, const VPoly& target) {
  const CanonicalSystem& sys = ctx.canonical(element, f, q);
  return sys.lu.solve(canonical_moments(ctx, sys, target));
}

Eigen::VectorXd l2_project(MeshContext& ctx, int element, Family f, int q,
                           const VPoly& target) {
  const BasisSet& basis = ctx.basis(element, f, q);
  const QuadRule& rule = ctx.tet_rule(element, target.degree() + q + 1);
  return coefficients_in_basis(basis, target, rule);
}

Eigen::VectorXd l2_project(MeshContext& ctx, int element, Family f, int q,
                           const VectorFn& target, int quad_degree) {
  const BasisSet& basis = ctx.basis(element, f, q);
  const QuadRule& rule = ctx.tet_rule(element, quad_degree);
  Eigen::MatrixXd tv(rule.size(), 3);
  for (int p = 0; p < rule.size(); ++p)
    tv.row(p) = target(rule.point(p)).transpose();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  for (int comp = 0; comp < 3; ++comp)
    c.noalias() += basis.values(rule.points, comp).transpose() *
                   rule.weights.cwiseProduct(tv.col(comp));
  return c;
}

Eigen::VectorXd l2_project_scalar(MeshContext& ctx, int element, int q,
                                  const ScalarFn& target, int quad_degree) {
  const BasisSet& basis = ctx.basis(element, Family::P, q);
  const QuadRule& rule = ctx.tet_rule(element, quad_degree);
  Eigen::VectorXd tv(rule.size());
  for (int p = 0; p < rule.size(); ++p) tv(p) = target(rule.point(p));
  return basis.values(rule.points, 0).transpose() *
         rule.weights.cwiseProduct(tv);
}

Eigen::VectorXd l2_project_scalar(MeshContext& ctx, int element, int q,
                                  const Poly& target) {
  const BasisSet& basis = ctx.basis(element, Family::P, q);
  const QuadRule& rule = ctx.tet_rule(element, target.degree() + q + 1);
  return coefficients_in_basis(basis, target, rule);
}

}  // namespace cpj
