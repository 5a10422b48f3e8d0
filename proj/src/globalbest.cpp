#include "commuteproj/globalbest.hpp"

namespace cpj {

namespace {

std::vector<int> all_elements(const TetMesh& mesh) {
  std::vector<int> all(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
  return all;
}

// Point values of the input field (or of its curl) on one element.
Eigen::MatrixXd eval_input(MeshContext& ctx, const FieldInput& v, int element,
                           const QuadRule& rule, bool use_curl) {
  if (field_is_discrete(v)) {
    const VPoly poly = ctx.field_on_element(*v.discrete, element);
    return use_curl ? poly.curl().eval(rule.points) : poly.eval(rule.points);
  }
  const VectorFn& fn = use_curl ? v.analytic->curl : v.analytic->value;
  if (!fn) throw std::invalid_argument("analytic field lacks a required callback");
  Eigen::MatrixXd out(rule.size(), 3);
  for (int p = 0; p < rule.size(); ++p) out.row(p) = fn(rule.point(p)).transpose();
  return out;
}

double weight_hp(const TetMesh& mesh, int element, int p) {
  const double w = mesh.tet(element).diameter / (p + 1);
  return w * w;
}

}  // namespace

namespace {

Eigen::Vector3d fd_partial(const VectorFn& f, const Eigen::Vector3d& x,
                           std::array<int, 3> alpha, double h) {
  for (int axis = 0; axis < 3; ++axis) {
    if (alpha[axis] == 0) continue;
    std::array<int, 3> lower = alpha;
    lower[axis] -= 1;
    Eigen::Vector3d dx = Eigen::Vector3d::Zero();
    dx(axis) = h;
    return (fd_partial(f, x + dx, lower, h) - fd_partial(f, x - dx, lower, h)) /
           (2.0 * h);
  }
  return f(x);
}

// Squared H^m(K) norm (all partials up to order m). Polynomial inputs are
// differentiated symbolically; callbacks by nested central differences
// (reporting accuracy).
double sobolev_norm2(MeshContext& ctx, int element, const FieldInput& v,
                     bool use_curl, int m, int qd) {
  const QuadRule& rule = ctx.tet_rule(element, qd);
  double total = 0.0;
  if (field_is_discrete(v)) {
    VPoly base = ctx.field_on_element(*v.discrete, element);
    if (use_curl) base = base.curl();
    for (int order = 0; order <= m; ++order)
      for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b) {
          const std::array<int, 3> alpha = {a, b, order - a - b};
          VPoly d = base;
          for (int axis = 0; axis < 3; ++axis)
            for (int rep = 0; rep < alpha[axis]; ++rep)
              d = VPoly(d[0].derivative(axis), d[1].derivative(axis),
                        d[2].derivative(axis));
          total += rule.weights.dot(d.eval(rule.points).rowwise().squaredNorm());
        }
    return total;
  }
  const VectorFn& fn = use_curl ? v.analytic->curl : v.analytic->value;
  if (!fn) return 0.0;
  const double h = 1e-3;
  for (int order = 0; order <= m; ++order)
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) {
        const std::array<int, 3> alpha = {a, b, order - a - b};
        double part = 0.0;
        for (int pt = 0; pt < rule.size(); ++pt)
          part += rule.weights(pt) *
                  fd_partial(fn, rule.point(pt), alpha, h).squaredNorm();
        total += part;
      }
  return total;
}

}  // namespace

double element_error2(MeshContext& ctx, const FieldInput& v, int element,
                      Family f, int q, const Eigen::VectorXd& coef,
                      int quad_degree, bool use_curl) {
  const QuadRule& rule = ctx.tet_rule(element, quad_degree);
  Eigen::MatrixXd diff = eval_input(ctx, v, element, rule, use_curl);
  if (coef.size()) {
    const BasisSet& basis = ctx.basis(element, f, q);
    for (int c = 0; c < 3; ++c)
      diff.col(c) -= basis.values(rule.points, c) * coef;
  }
  return rule.weights.dot(diff.rowwise().squaredNorm());
}

GlobalBestResult global_unconstrained_best(MeshContext& ctx,
                                           const FieldInput& v, int p,
                                           const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, all_elements(mesh), Family::ND, p,
                        neumann_faces(mesh));
  const int n = space.dofs();
  Eigen::MatrixXd A = space.gram();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const int qd = cfg.analytic_quad(p);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& em = space.element_map(k);
    const Eigen::MatrixXd CB = ctx.curl_matrix(k, p) * em.B;
    const double w = weight_hp(mesh, k, p);
    const Eigen::MatrixXd block = w * (CB.transpose() * CB);
    for (size_t i = 0; i < em.gdofs.size(); ++i)
      for (size_t j = 0; j < em.gdofs.size(); ++j)
        A(em.gdofs[i], em.gdofs[j]) += block(i, j);
    // Loads: (v, basis) + w * (curl v, curl basis).
    const Eigen::VectorXd lv = field_is_discrete(v)
                                   ? l2_project(ctx, k, Family::ND, p,
                                                ctx.field_on_element(*v.discrete, k))
                                   : l2_project(ctx, k, Family::ND, p,
                                                v.analytic->value, qd);
    Eigen::VectorXd lc;
    if (field_is_discrete(v))
      lc = l2_project(ctx, k, Family::RT, p,
                      ctx.field_on_element(*v.discrete, k).curl());
    else
      lc = l2_project(ctx, k, Family::RT, p, v.analytic->curl, qd);
    const Eigen::VectorXd local = em.B.transpose() * lv + w * (CB.transpose() * lc);
    for (size_t i = 0; i < em.gdofs.size(); ++i) b(em.gdofs[i]) += local(i);
  }

  GlobalBestResult out;
  // In-place factorization: A is not needed afterwards and can be large.
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::logic_error("global_unconstrained_best: system not SPD");
  out.dofs = llt.solve(b);
  out.broken = space.to_broken(out.dofs, mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    out.value2 += element_error2(ctx, v, k, Family::ND, p, out.broken.coef[k],
                                 qd, false);
    out.value2 += weight_hp(mesh, k, p) *
                  element_error2(ctx, v, k, Family::RT, p,
                                 ctx.curl_matrix(k, p) * out.broken.coef[k], qd,
                                 true);
  }
  return out;
}

GlobalBestResult global_constrained_best(MeshContext& ctx, const FieldInput& v,
                                         int p, const BrokenField& curl_target,
                                         const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, all_elements(mesh), Family::ND, p,
                        neumann_faces(mesh));
  const int qd = cfg.analytic_quad(p);

  KktProblem prob;
  prob.mass = space.gram();
  prob.load = Eigen::VectorXd::Zero(space.dofs());
  prob.feas_tol = cfg.feas_tol;
  const int rows = space_dimension(Family::RT, p);
  prob.constraints =
      Eigen::MatrixXd::Zero(rows * mesh.num_elements(), space.dofs());
  prob.rhs.resize(prob.constraints.rows());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd lv =
        field_is_discrete(v)
            ? l2_project(ctx, k, Family::ND, p, ctx.field_on_element(*v.discrete, k))
            : l2_project(ctx, k, Family::ND, p, v.analytic->value, qd);
    const auto& em = space.element_map(k);
    for (size_t i = 0; i < em.gdofs.size(); ++i)
      prob.load(em.gdofs[i]) += (em.B.transpose() * lv)(i);
    space.scatter_rows(k, ctx.curl_matrix(k, p), prob.constraints, k * rows);
    prob.rhs.segment(k * rows, rows) = curl_target.coef[k];
  }

  GlobalBestResult out;
  try {
    out.dofs = solve_kkt(prob).x;
  } catch (const InfeasibleConstraints& e) {
    throw std::runtime_error(
        "global_constrained_best: curl target not attainable in the "
        "conforming space (residual " +
        std::to_string(e.residual) + ")");
  }
  out.broken = space.to_broken(out.dofs, mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    out.value2 += element_error2(ctx, v, k, Family::ND, p, out.broken.coef[k],
                                 qd, false);
  return out;
}

GlobalBestResult mixed_pi_div(MeshContext& ctx, const FieldInput& w, int p,
                              const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, all_elements(mesh), Family::RT, p,
                        neumann_faces(mesh));
  const int qd = cfg.analytic_quad(p);

  KktProblem prob;
  prob.mass = space.gram();
  prob.load = Eigen::VectorXd::Zero(space.dofs());
  prob.feas_tol = cfg.feas_tol;
  const int rows = space_dimension(Family::P, p);
  prob.constraints =
      Eigen::MatrixXd::Zero(rows * mesh.num_elements(), space.dofs());
  prob.rhs = Eigen::VectorXd::Zero(prob.constraints.rows());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd lw =
        field_is_discrete(w)
            ? l2_project(ctx, k, Family::RT, p, ctx.field_on_element(*w.discrete, k))
            : l2_project(ctx, k, Family::RT, p, w.analytic->value, qd);
    const auto& em = space.element_map(k);
    for (size_t i = 0; i < em.gdofs.size(); ++i)
      prob.load(em.gdofs[i]) += (em.B.transpose() * lw)(i);
    space.scatter_rows(k, ctx.div_matrix(k, p), prob.constraints, k * rows);
  }

  GlobalBestResult out;
  out.dofs = solve_kkt(prob).x;
  out.broken = space.to_broken(out.dofs, mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    out.value2 += element_error2(ctx, w, k, Family::RT, p, out.broken.coef[k],
                                 qd, false);
  return out;
}

GlobalBestResult mixed_three_field(MeshContext& ctx, const FieldInput& v,
                                   int p, const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const auto elems = all_elements(mesh);
  ConformingSpace nd(ctx, elems, Family::ND, p, neumann_faces(mesh));
  ConformingSpace rt(ctx, elems, Family::RT, p, neumann_faces(mesh));
  const int qd = cfg.analytic_quad(p);
  const int n1 = nd.dofs(), n2 = rt.dofs();
  const int pdim = space_dimension(Family::P, p);
  const int n3 = pdim * mesh.num_elements();

  Eigen::MatrixXd M1 = nd.gram();
  Eigen::MatrixXd K21 = Eigen::MatrixXd::Zero(n2, n1);  // (curl v_h, r_h)
  Eigen::MatrixXd K32 = Eigen::MatrixXd::Zero(n3, n2);  // (div r_h, s_h)
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(n1);
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(n2);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& em1 = nd.element_map(k);
    const auto& em2 = rt.element_map(k);
    const Eigen::MatrixXd CB1 = ctx.curl_matrix(k, p) * em1.B;
    const Eigen::MatrixXd DB2 = ctx.div_matrix(k, p) * em2.B;
    const Eigen::MatrixXd block = em2.B.transpose() * CB1;
    for (size_t i = 0; i < em2.gdofs.size(); ++i)
      for (size_t j = 0; j < em1.gdofs.size(); ++j)
        K21(em2.gdofs[i], em1.gdofs[j]) += block(i, j);
    for (int r = 0; r < pdim; ++r)
      for (size_t j = 0; j < em2.gdofs.size(); ++j)
        K32(k * pdim + r, em2.gdofs[j]) += DB2(r, j);

    const Eigen::VectorXd lv =
        field_is_discrete(v)
            ? l2_project(ctx, k, Family::ND, p, ctx.field_on_element(*v.discrete, k))
            : l2_project(ctx, k, Family::ND, p, v.analytic->value, qd);
    Eigen::VectorXd lc;
    if (field_is_discrete(v))
      lc = l2_project(ctx, k, Family::RT, p,
                      ctx.field_on_element(*v.discrete, k).curl());
    else
      lc = l2_project(ctx, k, Family::RT, p, v.analytic->curl, qd);
    for (size_t i = 0; i < em1.gdofs.size(); ++i)
      b1(em1.gdofs[i]) += (em1.B.transpose() * lv)(i);
    for (size_t i = 0; i < em2.gdofs.size(); ++i)
      b2(em2.gdofs[i]) += (em2.B.transpose() * lc)(i);
  }

  const int n = n1 + n2 + n3;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  S.topLeftCorner(n1, n1) = M1;
  S.block(0, n1, n1, n2) = K21.transpose();
  S.block(n1, 0, n2, n1) = K21;
  S.block(n1, n1 + n2, n2, n3) = K32.transpose();
  S.block(n1 + n2, n1, n3, n2) = K32;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(n1) = b1;
  rhs.segment(n1, n2) = b2;

  // The multiplier q_h may be determined only up to a constant (e.g. when
  // Gamma_D is empty); a min-norm least-squares solve fixes it.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(S);
  const Eigen::VectorXd sol = cod.solve(rhs);
  const double residual = (S * sol - rhs).norm() / std::max(1.0, rhs.norm());
  if (residual > 1e-8)
    throw std::runtime_error("mixed_three_field: saddle solve residual " +
                             std::to_string(residual));

  GlobalBestResult out;
  out.dofs = sol.head(n1);
  out.broken = broken_curl(ctx, nd.to_broken(out.dofs, mesh.num_elements()));
  for (int k = 0; k < mesh.num_elements(); ++k)
    out.value2 += element_error2(ctx, v, k, Family::RT, p, out.broken.coef[k],
                                 qd, true);
  return out;
}

LocalBestReport localbest_sum(MeshContext& ctx, const FieldInput& v, int p,
                              const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const int qd = cfg.analytic_quad(p);
  LocalBestReport rep;
  rep.localbest2.resize(mesh.num_elements());
  rep.osc2.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd proj =
        field_is_discrete(v)
            ? l2_project(ctx, k, Family::ND, p, ctx.field_on_element(*v.discrete, k))
            : l2_project(ctx, k, Family::ND, p, v.analytic->value, qd);
    rep.localbest2[k] =
        element_error2(ctx, v, k, Family::ND, p, proj, qd, false);
    Eigen::VectorXd cpj;
    if (field_is_discrete(v))
      cpj = l2_project(ctx, k, Family::RT, p,
                         ctx.field_on_element(*v.discrete, k).curl());
    else
      cpj = l2_project(ctx, k, Family::RT, p, v.analytic->curl, qd);
    rep.osc2[k] = weight_hp(mesh, k, p) *
                  element_error2(ctx, v, k, Family::RT, p, cpj, qd, true);
    rep.localbest2_sum += rep.localbest2[k];
    rep.osc2_sum += rep.osc2[k];
  }
  return rep;
}

EquivReport equivalence_report(MeshContext& ctx, const FieldInput& v, int p,
                               const PipelineConfig& cfg, double reg_s,
                               double reg_t) {
  const TetMesh& mesh = ctx.mesh();
  EquivReport rep;
  rep.degree = p;
  rep.local = localbest_sum(ctx, v, p, cfg);
  rep.localbest2_sum = rep.local.localbest2_sum;
  rep.osc2_sum = rep.local.osc2_sum;
  rep.rhs2 = rep.localbest2_sum + rep.osc2_sum;

  // Constrained side: the curl target is the H(div) projection of curl v.
  FieldInput w;
  AnalyticVecField w_analytic;
  BrokenField w_broken;
  if (field_is_discrete(v)) {
    w_broken = broken_curl(ctx, *v.discrete);
    w.discrete = &w_broken;
  } else {
    w_analytic.value = v.analytic->curl;
    w.analytic = &w_analytic;
  }
  PipelineConfig hcfg = cfg;
  hcfg.variant = Variant::Canonical;
  const HdivProjection phd = phd_apply(ctx, w, hcfg);
  rep.constrained_min2 = global_constrained_best(ctx, v, p, phd.sigma, cfg).value2;
  rep.lhs_constrained2 = rep.constrained_min2 + rep.osc2_sum;

  // Mixed-method variant: the curl target is the global divergence-free L2
  // projection instead of the local H(div) projection.
  const GlobalBestResult pidiv = mixed_pi_div(ctx, w, p, cfg);
  rep.constrained_mixed_min2 =
      global_constrained_best(ctx, v, p, pidiv.broken, cfg).value2;

  rep.m2 = global_unconstrained_best(ctx, v, p, cfg).value2;

  // Zero convention: if both sides vanish at solver precision relative to
  // the input norm, the ratio is 1 by definition.
  double vnorm2 = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k)
    vnorm2 += element_error2(ctx, v, k, Family::ND, p, Eigen::VectorXd(),
                             cfg.analytic_quad(p), false);
  const double tiny = 1e-22 * vnorm2 + 1e-300;
  rep.ratio_constrained =
      rep.rhs2 < tiny && rep.lhs_constrained2 < tiny
          ? 1.0
          : rep.lhs_constrained2 / std::max(rep.rhs2, tiny);
  rep.ratio_unconstrained = rep.rhs2 < tiny && rep.m2 < tiny
                                ? 1.0
                                : rep.m2 / std::max(rep.rhs2, tiny);
  const double lhs_mixed2 = rep.constrained_mixed_min2 + rep.osc2_sum;
  rep.ratio_constrained_mixed = rep.rhs2 < tiny && lhs_mixed2 < tiny
                                    ? 1.0
                                    : lhs_mixed2 / std::max(rep.rhs2, tiny);

  if (p >= 1) {
    const int qd = cfg.analytic_quad(p);
    double rhs = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const Eigen::VectorXd proj =
          field_is_discrete(v)
              ? l2_project(ctx, k, Family::ND, p - 1,
                           ctx.field_on_element(*v.discrete, k))
              : l2_project(ctx, k, Family::ND, p - 1, v.analytic->value, qd);
      rhs += element_error2(ctx, v, k, Family::ND, p - 1, proj, qd, false);
      Eigen::VectorXd cpj;
      if (field_is_discrete(v))
        cpj = l2_project(ctx, k, Family::RT, p - 1,
                           ctx.field_on_element(*v.discrete, k).curl());
      else
        cpj = l2_project(ctx, k, Family::RT, p - 1, v.analytic->curl, qd);
      const double w_pm1 = mesh.tet(k).diameter / p;
      rhs += w_pm1 * w_pm1 *
             element_error2(ctx, v, k, Family::RT, p - 1, cpj, qd, true);
    }
    rep.rhs_probust2 = rhs;
    rep.ratio_probust = rep.m2 < tiny && rhs < tiny
                            ? 1.0
                            : rep.m2 / std::max(rhs, tiny);
  }

  // Reported hp bound terms at q = p+1. The effective regularity orders are
  // capped at q (the bound saturates there) and, for transcendental
  // callbacks, at derivative order 3.
  {
    const int q = p + 1;
    const int cap = field_is_discrete(v) ? q : std::min(q, 3);
    const int s_eff = static_cast<int>(std::min<double>(reg_s, cap));
    const int t_eff = static_cast<int>(std::min<double>(reg_t, cap));
    const int qd = cfg.analytic_quad(p);
    rep.hp_term2.resize(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const double h = mesh.tet(k).diameter;
      const double ns = sobolev_norm2(ctx, k, v, false, s_eff, qd);
      const double nt = sobolev_norm2(ctx, k, v, true, t_eff, qd);
      const double a =
          std::pow(h, std::min(q, s_eff)) / std::pow(double(q), s_eff);
      const double b = h / q * std::pow(h, std::min(q, t_eff)) /
                       std::pow(double(q), t_eff);
      rep.hp_term2[k] = a * a * ns + b * b * nt;
      rep.hp_term2_sum += rep.hp_term2[k];
    }
  }
  return rep;
}

}  // namespace cpj
