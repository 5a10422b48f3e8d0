#include "commuteproj/hdiv_proj.hpp"

#include <algorithm>

namespace cpj {

const Eigen::VectorXd& PatchField::on(int element) const {
  const auto it = std::lower_bound(elements.begin(), elements.end(), element);
  if (it == elements.end() || *it != element)
    throw std::runtime_error("PatchField: element not in patch");
  return coef[it - elements.begin()];
}

bool PatchField::covers(int element) const {
  return std::binary_search(elements.begin(), elements.end(), element);
}

bool field_is_discrete(const FieldInput& w) {
  if ((w.analytic == nullptr) == (w.discrete == nullptr))
    throw std::invalid_argument("FieldInput: exactly one of analytic/discrete");
  return w.discrete != nullptr;
}

VPoly field_vpoly(MeshContext& ctx, const FieldInput& w, int element) {
  if (!field_is_discrete(w))
    throw std::logic_error("field_vpoly: analytic input has no polynomial form");
  return ctx.field_on_element(*w.discrete, element);
}

Eigen::VectorXd project_field(MeshContext& ctx, const FieldInput& w,
                              int element, Family f, int q,
                              const PipelineConfig& cfg) {
  if (field_is_discrete(w))
    return l2_project(ctx, element, f, q, field_vpoly(ctx, w, element));
  return l2_project(ctx, element, f, q, w.analytic->value,
                    cfg.analytic_quad(q));
}

Eigen::VectorXd hat_divergence_rhs(MeshContext& ctx, const FieldInput& w,
                                   int element, int vertex, int q,
                                   const PipelineConfig& cfg,
                                   bool with_div_term, double sign) {
  const Eigen::Vector3d g = ctx.hat_gradient(element, vertex);
  if (field_is_discrete(w)) {
    const VPoly wp = field_vpoly(ctx, w, element);
    Poly expr = wp.dot(g);
    if (with_div_term) expr += ctx.hat_poly(element, vertex) * wp.div();
    return l2_project_scalar(ctx, element, q, expr * sign);
  }
  const AnalyticVecField& af = *w.analytic;
  const Poly hat = ctx.hat_poly(element, vertex);
  const bool has_div = with_div_term && af.divergence != nullptr;
  auto fn = [&](const Eigen::Vector3d& x) {
    double val = g.dot(af.value(x));
    if (has_div) val += hat.eval(x) * af.divergence(x);
    return sign * val;
  };
  return l2_project_scalar(ctx, element, q, fn, cfg.analytic_quad(q));
}

void record_check(std::vector<CheckRecord>& checks, const std::string& name,
                  int entity, double residual, double scale, double tol,
                  bool throw_on_fail) {
  CheckRecord rec{name, entity, residual, scale,
                  residual <= tol * scale + 1e-300};
  checks.push_back(rec);
  if (!rec.passed && throw_on_fail)
    throw PipelineError(
        name + " failed at entity " + std::to_string(entity) + ": residual " +
            std::to_string(residual) + " > " + std::to_string(tol) +
            " * scale " + std::to_string(scale),
        rec);
}

Eigen::VectorXd phd_tau_element(MeshContext& ctx, const FieldInput& w,
                                int element, const PipelineConfig& cfg) {
  const int p = cfg.degree;
  const int q = cfg.variant == Variant::Canonical ? p : p - 1;
  if (q < 0)
    throw std::invalid_argument("alternative variant requires degree >= 1");

  KktProblem prob;
  const int dim = space_dimension(Family::RT, q);
  prob.mass = Eigen::MatrixXd::Identity(dim, dim);
  prob.load = project_field(ctx, w, element, Family::RT, q, cfg);
  prob.constraints = ctx.div_matrix(element, q);
  prob.feas_tol = cfg.feas_tol;
  if (cfg.variant == Variant::Canonical) {
    if (field_is_discrete(w)) {
      prob.rhs = l2_project_scalar(ctx, element, q,
                                   field_vpoly(ctx, w, element).div());
    } else if (w.analytic->divergence != nullptr) {
      prob.rhs = l2_project_scalar(ctx, element, q, w.analytic->divergence,
                                   cfg.analytic_quad(q));
    } else {
      prob.rhs = Eigen::VectorXd::Zero(prob.constraints.rows());
    }
  } else {
    prob.rhs = Eigen::VectorXd::Zero(prob.constraints.rows());
  }
  return solve_kkt(prob).x;
}

PatchField phd_sigma_patch(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& tau, const FieldInput& w,
                           const PipelineConfig& cfg) {
  const int p = cfg.degree;
  const TetMesh& mesh = ctx.mesh();
  ConformingSpace space(ctx, patch.elements, Family::RT, p,
                        patch_essential_faces(mesh, patch));

  // Objective target: the hat-function cutoff of tau, brought back to
  // degree p (canonical interpolation in the canonical variant, plain L2
  // projection in the alternative one).
  BrokenField target = BrokenField::zeros(Family::RT, p, mesh.num_elements(),
                                          space_dimension(Family::RT, p));
  for (int k : patch.elements) {
    const VPoly ht =
        ctx.hat_poly(k, patch.vertex) * ctx.field_on_element(tau, k);
    target.coef[k] = cfg.variant == Variant::Canonical
                         ? canonical_interpolate(ctx, k, Family::RT, p, ht)
                         : l2_project(ctx, k, Family::RT, p, ht);
  }

  KktProblem prob;
  prob.mass = space.gram();
  prob.load = space.load_from_broken(target);
  prob.feas_tol = cfg.feas_tol;

  const int rows_per_elem = space_dimension(Family::P, p);
  const int ne = static_cast<int>(patch.elements.size());
  prob.constraints = Eigen::MatrixXd::Zero(rows_per_elem * ne, space.dofs());
  prob.rhs.resize(rows_per_elem * ne);
  double compat = 0.0;  // integral of the divergence datum over the patch
  for (int i = 0; i < ne; ++i) {
    const int k = patch.elements[i];
    space.scatter_rows(k, ctx.div_matrix(k, p), prob.constraints,
                       i * rows_per_elem);
    const Eigen::VectorXd rhs = hat_divergence_rhs(
        ctx, w, k, patch.vertex, p, cfg,
        /*with_div_term=*/cfg.variant == Variant::Canonical);
    prob.rhs.segment(i * rows_per_elem, rows_per_elem) = rhs;
    const BasisSet& pb = ctx.basis(k, Family::P, p);
    compat += integrate(pb.scalar_combination(rhs),
                        ctx.tet_rule(k, 2 * p + 2));
  }

  PatchField out;
  out.vertex = patch.vertex;
  out.elements = patch.elements;
  try {
    const KktSolution sol = solve_kkt(prob);
    for (int k : patch.elements) out.coef.push_back(space.local_coeffs(k, sol.x));
  } catch (const InfeasibleConstraints& e) {
    std::string why = "hdiv patch problem infeasible at vertex " +
                      std::to_string(patch.vertex) + " (residual " +
                      std::to_string(e.residual) + ")";
    if (patch.cls != PatchClass::DirichletBoundary)
      why += "; mean-value compatibility of the divergence datum = " +
             std::to_string(compat);
    throw PipelineError(why, CheckRecord{"hdiv.patch_feasibility", patch.vertex,
                                         e.residual, 1.0, false});
  }
  return out;
}

HdivProjection phd_apply(MeshContext& ctx, const FieldInput& w,
                         const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const int p = cfg.degree;
  if (cfg.variant == Variant::Alternative && p < 1)
    throw std::invalid_argument("alternative variant requires degree >= 1");
  const int qt = cfg.variant == Variant::Canonical ? p : p - 1;

  HdivProjection out;
  out.degree = p;
  out.variant = cfg.variant;

  out.tau.family = Family::RT;
  out.tau.q = qt;
  out.tau.coef.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    out.tau.coef[k] = phd_tau_element(ctx, w, k, cfg);

  const int dim = space_dimension(Family::RT, p);
  out.sigma = BrokenField::zeros(Family::RT, p, mesh.num_elements(), dim);
  out.sigma_a.reserve(mesh.num_vertices());
  for (int a = 0; a < mesh.num_vertices(); ++a) {
    PatchField pf = phd_sigma_patch(ctx, mesh.vertex_patch(a), out.tau, w, cfg);
    for (size_t i = 0; i < pf.elements.size(); ++i)
      out.sigma.coef[pf.elements[i]] += pf.coef[i];
    out.sigma_a.push_back(std::move(pf));
  }

  if (cfg.run_assertions) {
    // H(div) conformity: vanishing normal jumps across interior faces and
    // vanishing normal trace on the Neumann boundary.
    std::vector<int> all(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) all[k] = k;
    const double jump = face_jump_l2(ctx, out.sigma,
                                     conformity_faces(mesh, all, neumann_faces(mesh)),
                                     /*tangential=*/false);
    double hmin = mesh.tet(0).diameter;
    for (int k = 0; k < mesh.num_elements(); ++k)
      hmin = std::min(hmin, mesh.tet(k).diameter);
    const double jscale = std::max(out.sigma.l2_norm(), out.tau.l2_norm()) /
                          std::sqrt(hmin);
    record_check(out.checks, "hdiv.conformity", -1, jump, jscale, 1e-10, true);

    // Commuting property: div sigma equals the degree-p projection of div w.
    const BrokenField divs = broken_div(ctx, out.sigma);
    double res2 = 0.0, scale2 = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      Eigen::VectorXd rhs;
      if (cfg.variant == Variant::Canonical) {
        if (field_is_discrete(w))
          rhs = l2_project_scalar(ctx, k, p, field_vpoly(ctx, w, k).div());
        else if (w.analytic->divergence != nullptr)
          rhs = l2_project_scalar(ctx, k, p, w.analytic->divergence,
                                  cfg.analytic_quad(p));
        else
          rhs = Eigen::VectorXd::Zero(divs.coef[k].size());
      } else {
        rhs = Eigen::VectorXd::Zero(divs.coef[k].size());
      }
      res2 += (divs.coef[k] - rhs).squaredNorm();
      double sc = rhs.norm();
      for (int a : mesh.tet(k).v)
        sc += (ctx.div_matrix(k, p) * out.sigma_a[a].on(k)).norm();
      scale2 += sc * sc;
    }
    record_check(out.checks, "hdiv.commuting", -1, std::sqrt(res2),
                 std::sqrt(scale2) + 1e-300, 1e-10, true);
  }
  return out;
}

}  // namespace cpj
