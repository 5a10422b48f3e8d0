#include "commuteproj/hcurl_proj.hpp"

#include <algorithm>
#include <set>

namespace cpj {

namespace {

// (phi_j, e_c)_K for all basis functions: the 3 x dim moment matrix against
// constant vector fields.
Eigen::MatrixXd constant_moments(MeshContext& ctx, int element, Family f, int q) {
  Eigen::MatrixXd M(3, space_dimension(f, q));
  for (int c = 0; c < 3; ++c) {
    const VPoly ec = VPoly::constant(element_frame(ctx.mesh(), element),
                                     Eigen::Vector3d::Unit(c));
    M.row(c) = l2_project(ctx, element, f, q, ec).transpose();
  }
  return M;
}

// Vertices of the patch submesh, ascending.
std::vector<int> patch_vertices(const TetMesh& mesh, const VertexPatch& patch) {
  std::set<int> verts;
  for (int k : patch.elements)
    for (int v : mesh.tet(k).v) verts.insert(v);
  return {verts.begin(), verts.end()};
}

}  // namespace

Eigen::VectorXd phc_iota_element(MeshContext& ctx, const FieldInput& v,
                                 const BrokenField& tau, int element,
                                 const PipelineConfig& cfg) {
  const int q = cfg.variant == Variant::Canonical ? cfg.degree : cfg.degree - 1;
  KktProblem prob;
  const int dim = space_dimension(Family::ND, q);
  prob.mass = Eigen::MatrixXd::Identity(dim, dim);
  prob.load = project_field(ctx, v, element, Family::ND, q, cfg);
  prob.constraints = ctx.curl_matrix(element, q);
  prob.rhs = tau.coef[element];
  prob.feas_tol = cfg.feas_tol;
  try {
    return solve_kkt(prob).x;
  } catch (const InfeasibleConstraints& e) {
    throw PipelineError(
        "hcurl elementwise curl constraint infeasible on element " +
            std::to_string(element) + " (tau not divergence-free upstream?)",
        CheckRecord{"hcurl.iota_feasibility", element, e.residual, 1.0, false});
  }
}

PatchField phc_theta_patch(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& iota, const FieldInput& w,
                           const PipelineConfig& cfg,
                           std::vector<CheckRecord>& checks) {
  const TetMesh& mesh = ctx.mesh();
  const int p = cfg.degree;
  const int q = cfg.variant == Variant::Canonical ? p + 1 : p;
  const bool canonical = cfg.variant == Variant::Canonical;
  const int a = patch.vertex;

  ConformingSpace space(ctx, patch.elements, Family::RT, q,
                        patch_essential_faces(mesh, patch));

  // Objective target grad(psi_a) x iota_h, which lies in [P_q]^3 c RT_q.
  BrokenField target = BrokenField::zeros(Family::RT, q, mesh.num_elements(),
                                          space_dimension(Family::RT, q));
  for (int k : patch.elements) {
    const VPoly gxi = ctx.field_on_element(iota, k)
                          .cross_from_left(ctx.hat_gradient(k, a));
    target.coef[k] =
        coefficients_in_basis(ctx.basis(k, Family::RT, q), gxi,
                              ctx.tet_rule(k, 2 * (q + 1)),
                              /*require_member=*/true);
  }

  KktProblem prob;
  prob.mass = space.gram();
  prob.load = space.load_from_broken(target);
  prob.feas_tol = cfg.feas_tol;

  const int ne = static_cast<int>(patch.elements.size());
  const int div_rows = space_dimension(Family::P, q);
  const int mom_rows = canonical ? 3 : 0;
  prob.constraints =
      Eigen::MatrixXd::Zero(ne * (div_rows + mom_rows), space.dofs());
  prob.rhs.resize(prob.constraints.rows());

  double compat = 0.0;
  double rhs_scale = 0.0;
  std::vector<Eigen::VectorXd> div_rhs(ne);
  std::vector<Eigen::MatrixXd> moments(ne);
  for (int i = 0; i < ne; ++i) {
    const int k = patch.elements[i];
    space.scatter_rows(k, ctx.div_matrix(k, q), prob.constraints, i * div_rows);
    div_rhs[i] = hat_divergence_rhs(ctx, w, k, a, q, cfg,
                                    /*with_div_term=*/false, /*sign=*/-1.0);
    prob.rhs.segment(i * div_rows, div_rows) = div_rhs[i];
    const BasisSet& pb = ctx.basis(k, Family::P, q);
    compat += integrate(pb.scalar_combination(div_rhs[i]),
                        ctx.tet_rule(k, 2 * q + 2));
    rhs_scale += div_rhs[i].norm() * std::sqrt(mesh.tet(k).volume);
    if (canonical) {
      moments[i] = constant_moments(ctx, k, Family::RT, q);
      space.scatter_rows(k, moments[i], prob.constraints,
                         ne * div_rows + 3 * i);
      prob.rhs.segment(ne * div_rows + 3 * i, 3) = moments[i] * target.coef[k];
    }
  }

  if (cfg.run_assertions) {
    // Data regularity: the objective datum was verified to lie in RT_q by
    // the exact-membership projection above.
    record_check(checks, "hcurl.theta_data_regularity", a, 0.0, 1.0, 1e-10,
                 true);
    // Mean compatibility of the divergence datum on patches without a
    // Dirichlet face. Floor from the rotated-iota datum magnitude.
    double patch_volume = 0.0;
    for (int k : patch.elements) patch_volume += mesh.tet(k).volume;
    double target_norm = 0.0;
    for (int k : patch.elements) target_norm += target.coef[k].squaredNorm();
    const double compat_floor =
        1e-2 * std::sqrt(target_norm * patch_volume);
    if (patch.cls != PatchClass::DirichletBoundary)
      record_check(checks, "hcurl.theta_mean_compatibility", a,
                   std::abs(compat), rhs_scale + compat_floor, 1e-10, true);
    // Orthogonality of the datum pair against continuous piecewise affines:
    // (g x iota, grad eta)_omega + (g_div, eta)_omega = 0 for all patch hat
    // functions eta in the constrained affine space.
    const std::vector<int> pverts = patch_vertices(mesh, patch);
    const int nv = static_cast<int>(pverts.size());
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd mean_w = Eigen::VectorXd::Zero(nv);
    double tau_norm = 0.0, g_norm = 0.0, grad_eta = 0.0, patch_vol = 0.0;
    for (int i = 0; i < ne; ++i) {
      const int k = patch.elements[i];
      patch_vol += mesh.tet(k).volume;
      const Eigen::Vector3d mom3 =
          canonical ? Eigen::Vector3d(moments[i] * target.coef[k])
                    : Eigen::Vector3d(constant_moments(ctx, k, Family::RT, q) *
                                      target.coef[k]);
      tau_norm += target.coef[k].squaredNorm();
      g_norm += div_rhs[i].squaredNorm();
      for (int j = 0; j < nv; ++j) {
        const int b = pverts[j];
        const auto& tv = mesh.tet(k).v;
        if (std::find(tv.begin(), tv.end(), b) == tv.end()) continue;
        const Eigen::Vector3d geta = ctx.hat_gradient(k, b);
        grad_eta = std::max(grad_eta, geta.norm());
        r(j) += geta.dot(mom3);
        const Eigen::VectorXd eta_coef = l2_project_scalar(
            ctx, k, q, ctx.hat_poly(k, b));
        r(j) += div_rhs[i].dot(eta_coef);
        mean_w(j) += integrate(ctx.hat_poly(k, b), ctx.tet_rule(k, 2));
      }
    }
    Eigen::VectorXd r_constrained;
    if (patch.cls == PatchClass::DirichletBoundary) {
      // Free vertices: those not on a gamma_D face.
      std::set<int> fixed;
      for (int f : patch.dirichlet_faces)
        for (int v : mesh.face(f).v) fixed.insert(v);
      std::vector<double> rr;
      for (int j = 0; j < nv; ++j)
        if (!fixed.count(pverts[j])) rr.push_back(r(j));
      r_constrained = Eigen::Map<Eigen::VectorXd>(rr.data(), rr.size());
    } else {
      r_constrained = r - mean_w * (mean_w.dot(r) / mean_w.squaredNorm());
    }
    const double oscale = std::sqrt(patch_vol) *
                          (std::sqrt(tau_norm) * grad_eta + std::sqrt(g_norm));
    record_check(checks, "hcurl.theta_orthogonality", a,
                 r_constrained.size() ? r_constrained.cwiseAbs().maxCoeff() : 0.0,
                 oscale + 1e-300, 1e-10, true);
  }

  PatchField out;
  out.vertex = a;
  out.elements = patch.elements;
  try {
    const KktSolution sol = solve_kkt(prob);
    for (int k : patch.elements)
      out.coef.push_back(space.local_coeffs(k, sol.x));
  } catch (const InfeasibleConstraints& e) {
    throw PipelineError(
        "hcurl equilibration patch problem infeasible at vertex " +
            std::to_string(a) + " (residual " + std::to_string(e.residual) + ")",
        CheckRecord{"hcurl.theta_feasibility", a, e.residual, 1.0, false});
  }
  return out;
}

PatchField phc_delta_split(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& delta,
                           const PipelineConfig& cfg) {
  const int q = delta.q;  // p + 1
  const int a = patch.vertex;
  PatchField out;
  out.vertex = a;
  out.elements = patch.elements;
  for (int k : patch.elements) {
    const VPoly target_poly =
        ctx.hat_poly(k, a) * ctx.field_on_element(delta, k);
    const Eigen::VectorXd t =
        canonical_interpolate(ctx, k, Family::RT, q, target_poly);

    const CanonicalSystem& sys = ctx.canonical(k, Family::RT, q);
    const Eigen::MatrixXd& D = ctx.div_matrix(k, q);
    int trace_rows = 0;
    for (const auto& blk : sys.blocks)
      if (blk.domain == DofDomain::Face) trace_rows += blk.end - blk.begin;

    KktProblem prob;
    const int dim = space_dimension(Family::RT, q);
    prob.mass = Eigen::MatrixXd::Identity(dim, dim);
    prob.load = t;
    prob.constraints.resize(D.rows() + trace_rows, dim);
    prob.rhs.resize(prob.constraints.rows());
    prob.constraints.topRows(D.rows()) = D;
    prob.rhs.head(D.rows()).setZero();
    int row = static_cast<int>(D.rows());
    const Eigen::VectorXd canonical_dofs = sys.A * t;
    for (const auto& blk : sys.blocks) {
      if (blk.domain != DofDomain::Face) continue;
      const int nb = blk.end - blk.begin;
      prob.constraints.middleRows(row, nb) = sys.A.middleRows(blk.begin, nb);
      prob.rhs.segment(row, nb) = canonical_dofs.segment(blk.begin, nb);
      row += nb;
    }
    prob.feas_tol = cfg.feas_tol;
    try {
      out.coef.push_back(solve_kkt(prob).x);
    } catch (const InfeasibleConstraints& e) {
      throw PipelineError(
          "hcurl divergence-free splitting infeasible on element " +
              std::to_string(k) + ", vertex " + std::to_string(a) +
              " (constant-moment orthogonality violated upstream?)",
          CheckRecord{"hcurl.delta_split_feasibility", k, e.residual, 1.0,
                      false});
    }
  }
  return out;
}

PatchField phc_h_patch(MeshContext& ctx, const VertexPatch& patch,
                       const BrokenField& iota, const PatchField& sigma_a,
                       const PatchField& theta_a, const PatchField* delta_a,
                       const PipelineConfig& cfg,
                       std::vector<CheckRecord>& checks) {
  const TetMesh& mesh = ctx.mesh();
  const int p = cfg.degree;
  const bool canonical = cfg.variant == Variant::Canonical;
  const int a = patch.vertex;
  const int ne = static_cast<int>(patch.elements.size());

  // Curl datum rho^a = sigma^a + I^{RT,p}(theta^a - delta^a) (canonical) or
  // sigma^a + theta^a (alternative, already degree p).
  std::vector<Eigen::VectorXd> rho(ne);
  double div_scale = 0.0;
  for (int i = 0; i < ne; ++i) {
    const int k = patch.elements[i];
    if (canonical) {
      const BasisSet& rt1 = ctx.basis(k, Family::RT, p + 1);
      const Eigen::VectorXd diff = theta_a.on(k) - delta_a->on(k);
      const VPoly diff_poly = rt1.combination(diff);
      rho[i] = sigma_a.on(k) +
               canonical_interpolate(ctx, k, Family::RT, p, diff_poly);
      div_scale += (ctx.div_matrix(k, p + 1) * theta_a.on(k)).squaredNorm() +
                   (ctx.div_matrix(k, p + 1) * delta_a->on(k)).squaredNorm();
    } else {
      rho[i] = sigma_a.on(k) + theta_a.on(k);
      div_scale += (ctx.div_matrix(k, p) * theta_a.on(k)).squaredNorm();
    }
    div_scale += (ctx.div_matrix(k, p) * sigma_a.on(k)).squaredNorm();
  }

  if (cfg.run_assertions) {
    // Feasibility of the curl constraint: the datum must be divergence-free
    // and H_a(div)-conforming. Floors are set by the patch data magnitude.
    double base = 0.0, hmin = mesh.tet(patch.elements[0]).diameter;
    for (int i = 0; i < ne; ++i) {
      const int k = patch.elements[i];
      base += sigma_a.on(k).norm() + theta_a.on(k).norm() +
              iota.coef[k].norm() + (delta_a ? delta_a->on(k).norm() : 0.0);
      hmin = std::min(hmin, mesh.tet(k).diameter);
    }
    double divres = 0.0;
    BrokenField rho_broken = BrokenField::zeros(
        Family::RT, p, mesh.num_elements(), space_dimension(Family::RT, p));
    for (int i = 0; i < ne; ++i) {
      const int k = patch.elements[i];
      divres += (ctx.div_matrix(k, p) * rho[i]).squaredNorm();
      rho_broken.coef[k] = rho[i];
    }
    record_check(checks, "hcurl.curl_datum_divergence_free", a,
                 std::sqrt(divres),
                 std::sqrt(div_scale) + 1e-2 * base / hmin, 1e-10, true);
    const std::vector<int> cfaces = conformity_faces(
        mesh, patch.elements, patch_essential_faces(mesh, patch));
    const double jump = face_jump_l2(ctx, rho_broken, cfaces, false);
    const double jscale = (rho_broken.l2_norm() + 1e-2 * base) /
                          std::sqrt(hmin);
    record_check(checks, "hcurl.curl_datum_conformity", a, jump, jscale, 1e-10,
                 true);
  }

  ConformingSpace space(ctx, patch.elements, Family::ND, p,
                        patch_essential_faces(mesh, patch));

  BrokenField target = BrokenField::zeros(Family::ND, p, mesh.num_elements(),
                                          space_dimension(Family::ND, p));
  for (int k : patch.elements) {
    const VPoly psi_iota =
        ctx.hat_poly(k, a) * ctx.field_on_element(iota, k);
    target.coef[k] = canonical
                         ? canonical_interpolate(ctx, k, Family::ND, p, psi_iota)
                         : l2_project(ctx, k, Family::ND, p, psi_iota);
  }

  KktProblem prob;
  prob.mass = space.gram();
  prob.load = space.load_from_broken(target);
  prob.feas_tol = cfg.feas_tol;
  const int curl_rows = space_dimension(Family::RT, p);
  prob.constraints = Eigen::MatrixXd::Zero(ne * curl_rows, space.dofs());
  prob.rhs.resize(prob.constraints.rows());
  for (int i = 0; i < ne; ++i) {
    const int k = patch.elements[i];
    space.scatter_rows(k, ctx.curl_matrix(k, p), prob.constraints,
                       i * curl_rows);
    prob.rhs.segment(i * curl_rows, curl_rows) = rho[i];
  }

  PatchField out;
  out.vertex = a;
  out.elements = patch.elements;
  try {
    const KktSolution sol = solve_kkt(prob);
    for (int k : patch.elements)
      out.coef.push_back(space.local_coeffs(k, sol.x));
  } catch (const InfeasibleConstraints& e) {
    throw PipelineError(
        "hcurl final patch problem infeasible at vertex " + std::to_string(a) +
            " (residual " + std::to_string(e.residual) + ")",
        CheckRecord{"hcurl.h_feasibility", a, e.residual, 1.0, false});
  }
  return out;
}

HcurlProjection phc_apply(MeshContext& ctx, const FieldInput& v,
                          const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const int p = cfg.degree;
  const bool canonical = cfg.variant == Variant::Canonical;
  if (!canonical && p < 1)
    throw std::invalid_argument("alternative variant requires degree >= 1");

  HcurlProjection out;
  out.degree = p;
  out.variant = cfg.variant;

  // Stage 0: w = curl v, divergence-free by construction.
  AnalyticVecField w_analytic;
  BrokenField w_broken;
  FieldInput w;
  if (field_is_discrete(v)) {
    w_broken = broken_curl(ctx, *v.discrete);
    w.discrete = &w_broken;
  } else {
    if (!v.analytic->curl)
      throw std::invalid_argument("hcurl input requires an explicit curl");
    w_analytic.value = v.analytic->curl;
    w.analytic = &w_analytic;
  }
  out.hdiv = phd_apply(ctx, w, cfg);
  if (cfg.corrupt_patch >= 0 && cfg.corrupt_patch < mesh.num_vertices()) {
    // Test hook: perturb one patch contribution (and its assembled sum).
    PatchField& pf = out.hdiv.sigma_a[cfg.corrupt_patch];
    if (!pf.coef.empty()) {
      pf.coef[0](0) += cfg.corrupt_amount;
      out.hdiv.sigma.coef[pf.elements[0]](0) += cfg.corrupt_amount;
    }
  }

  // Stage 1: elementwise curl-constrained approximation of v.
  out.iota.family = Family::ND;
  out.iota.q = canonical ? p : p - 1;
  out.iota.coef.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    out.iota.coef[k] = phc_iota_element(ctx, v, out.hdiv.tau, k, cfg);

  // Stage 2: patch equilibration.
  const int qtheta = canonical ? p + 1 : p;
  std::vector<VertexPatch> patches;
  patches.reserve(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); ++a)
    patches.push_back(mesh.vertex_patch(a));
  out.theta_a.reserve(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); ++a)
    out.theta_a.push_back(
        phc_theta_patch(ctx, patches[a], out.iota, w, cfg, out.checks));

  // Stage 3: delta = sum of theta^a; divergence-free and conforming.
  const int dim_theta = space_dimension(Family::RT, qtheta);
  out.delta = BrokenField::zeros(Family::RT, qtheta, mesh.num_elements(),
                                 dim_theta);
  for (int a = 0; a < mesh.num_vertices(); ++a)
    for (size_t i = 0; i < out.theta_a[a].elements.size(); ++i)
      out.delta.coef[out.theta_a[a].elements[i]] += out.theta_a[a].coef[i];

  // Absolute floors for the cancellation checks: when a quantity cancels to
  // zero exactly (curl-free data), the pre-cancellation terms are pure
  // roundoff and relative comparisons among them are meaningless. The floor
  // ties the effective absolute tolerance to the pipeline input magnitude.
  double hmin = mesh.tet(0).diameter;
  for (int k = 0; k < mesh.num_elements(); ++k)
    hmin = std::min(hmin, mesh.tet(k).diameter);
  const double base = out.iota.l2_norm() + out.hdiv.tau.l2_norm() +
                      out.hdiv.sigma.l2_norm() + out.delta.l2_norm();
  const double floor_div = 1e-2 * base / hmin;
  const double floor_mom = 1e-2 * base;
  const double floor_jump = 1e-2 * base / std::sqrt(hmin);

  if (cfg.run_assertions && canonical) {
    double divres = 0.0, divscale = 0.0, momres = 0.0, momscale = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const Eigen::MatrixXd& D = ctx.div_matrix(k, qtheta);
      divres += (D * out.delta.coef[k]).squaredNorm();
      const Eigen::MatrixXd mom = constant_moments(ctx, k, Family::RT, qtheta);
      momres += (mom * out.delta.coef[k]).squaredNorm();
      for (int a : mesh.tet(k).v) {
        divscale += (D * out.theta_a[a].on(k)).squaredNorm();
        momscale += (mom * out.theta_a[a].on(k)).squaredNorm();
      }
    }
    record_check(out.checks, "hcurl.delta_divergence_free", -1,
                 std::sqrt(divres), std::sqrt(divscale) + floor_div, 1e-10,
                 true);
    record_check(out.checks, "hcurl.delta_constant_moments", -1,
                 std::sqrt(momres), std::sqrt(momscale) + floor_mom, 1e-10,
                 true);
    std::vector<int> all(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
    const double jump =
        face_jump_l2(ctx, out.delta,
                     conformity_faces(mesh, all, neumann_faces(mesh)), false);
    record_check(out.checks, "hcurl.delta_conformity", -1, jump,
                 out.delta.l2_norm() / std::sqrt(hmin) + floor_jump, 1e-10,
                 true);
  }

  // Stage 4: divergence-free splitting (canonical variant only).
  if (canonical) {
    out.delta_a.reserve(mesh.num_vertices());
    for (int a = 0; a < mesh.num_vertices(); ++a)
      out.delta_a.push_back(
          phc_delta_split(ctx, patches[a], out.delta, cfg));
    if (cfg.run_assertions) {
      double sumres = 0.0, sumscale = 0.0, divres = 0.0, divscale = 0.0;
      for (int k = 0; k < mesh.num_elements(); ++k) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(dim_theta);
        for (int a : mesh.tet(k).v) {
          s += out.delta_a[a].on(k);
          sumscale += out.delta_a[a].on(k).squaredNorm();
          divres +=
              (ctx.div_matrix(k, qtheta) * out.delta_a[a].on(k)).squaredNorm();
          divscale += out.delta_a[a].on(k).squaredNorm() /
                      (mesh.tet(k).diameter * mesh.tet(k).diameter);
        }
        sumres += (s - out.delta.coef[k]).squaredNorm();
        sumscale += out.delta.coef[k].squaredNorm();
      }
      record_check(out.checks, "hcurl.delta_split_sum", -1, std::sqrt(sumres),
                   std::sqrt(sumscale) + floor_mom, 1e-10, true);
      record_check(out.checks, "hcurl.delta_split_divergence_free", -1,
                   std::sqrt(divres), std::sqrt(divscale) + floor_div, 1e-10,
                   true);
    }
  }

  // Stages 5-6: final patch corrections and assembly.
  const int dim_nd = space_dimension(Family::ND, p);
  out.h = BrokenField::zeros(Family::ND, p, mesh.num_elements(), dim_nd);
  out.h_a.reserve(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); ++a) {
    PatchField ha = phc_h_patch(ctx, patches[a], out.iota, out.hdiv.sigma_a[a],
                                out.theta_a[a],
                                canonical ? &out.delta_a[a] : nullptr, cfg,
                                out.checks);
    for (size_t i = 0; i < ha.elements.size(); ++i)
      out.h.coef[ha.elements[i]] += ha.coef[i];
    out.h_a.push_back(std::move(ha));
  }

  if (cfg.run_assertions) {
    std::vector<int> all(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
    const double jump = face_jump_l2(
        ctx, out.h, conformity_faces(mesh, all, neumann_faces(mesh)), true);
    record_check(out.checks, "hcurl.conformity", -1, jump,
                 (out.h.l2_norm() + out.iota.l2_norm()) / std::sqrt(hmin) +
                     floor_jump,
                 1e-10, true);

    // Commuting identity: curl of the projection equals the H(div)
    // projection of curl v (canonical) or sigma + delta (alternative).
    const BrokenField curl_h = broken_curl(ctx, out.h);
    double res = 0.0, scale = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      Eigen::VectorXd expect = out.hdiv.sigma.coef[k];
      if (!canonical) expect += out.delta.coef[k];
      res += (curl_h.coef[k] - expect).squaredNorm();
      double sc = expect.norm();
      for (int a : mesh.tet(k).v)
        sc += (ctx.curl_matrix(k, p) * out.h_a[a].on(k)).norm();
      scale += sc * sc;
    }
    record_check(out.checks,
                 canonical ? "hcurl.commuting" : "hcurl.commuting_alternative",
                 -1, std::sqrt(res), std::sqrt(scale) + floor_div, 1e-9, true);
  }
  return out;
}

}  // namespace cpj
