// The stable local commuting projector onto RT_p(T_h) with the H(div)
// conformity and boundary condition: elementwise divergence-constrained
// minimization, then a vertex-patch correction with hat-function cutoff,
// assembled over all patches. Includes the interpolator-free variant used
// for p-robust bounds.
#ifndef COMMUTEPROJ_HDIV_PROJ_HPP
#define COMMUTEPROJ_HDIV_PROJ_HPP

#include <optional>
#include <string>

#include "commuteproj/brokenops.hpp"
#include "commuteproj/cls.hpp"
#include "commuteproj/conforming.hpp"
#include "commuteproj/context.hpp"
#include "commuteproj/interp.hpp"

namespace cpj {

enum class Variant { Canonical, Alternative };

/// Analytic vector field with optional curl and divergence callbacks; a
/// missing divergence means "exactly zero" (the H(curl) pipeline feeds
/// w = curl v).
struct AnalyticVecField {
  VectorFn value;
  VectorFn curl;
  ScalarFn divergence;
};

/// Target of a projector pipeline: analytic or broken polynomial.
struct FieldInput {
  const AnalyticVecField* analytic = nullptr;
  const BrokenField* discrete = nullptr;
};

/// Vertex-patch field: coefficient vectors over the patch elements.
struct PatchField {
  int vertex = -1;
  std::vector<int> elements;
  std::vector<Eigen::VectorXd> coef;

  const Eigen::VectorXd& on(int element) const;
  bool covers(int element) const;
};

struct PipelineConfig {
  int degree = 0;
  Variant variant = Variant::Canonical;
  int quad_degree = -1;  // analytic-data quadrature; -1 = 2*degree+6
  double feas_tol = 1e-9;
  bool run_assertions = true;
  // Test hook: additively corrupt one sigma^a coefficient.
  int corrupt_patch = -1;
  double corrupt_amount = 0.0;

  // One fixed rule degree for all analytic-data integrals of a pipeline run,
  // so that paired projections at consecutive degrees cancel exactly. The
  // floor of 14 keeps the 1e-10-scale feasibility assertions below the
  // quadrature error of trigonometric data on O(1) elements.
  int analytic_quad(int) const {
    return quad_degree > 0 ? quad_degree : std::max(2 * degree + 8, 14);
  }
};

struct CheckRecord {
  std::string name;
  int entity = -1;  // patch vertex or element, -1 = global
  double residual = 0.0;
  double scale = 1.0;
  bool passed = true;
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& what, CheckRecord rec)
      : std::runtime_error(what), record(std::move(rec)) {}
  CheckRecord record;
};

struct HdivProjection {
  int degree = 0;
  Variant variant = Variant::Canonical;
  BrokenField tau;                  // RT_p (RT_{p-1} in the alternative)
  std::vector<PatchField> sigma_a;  // one per mesh vertex
  BrokenField sigma;                // assembled projection
  std::vector<CheckRecord> checks;
};

/// Step 1: elementwise divergence-constrained best approximation.
Eigen::VectorXd phd_tau_element(MeshContext& ctx, const FieldInput& w,
                                int element, const PipelineConfig& cfg);

/// Step 2: patch correction (divergence constraint per Remark-3.2 form,
/// with the input field w, not tau, in the gradient term).
PatchField phd_sigma_patch(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& tau, const FieldInput& w,
                           const PipelineConfig& cfg);

/// Full pipeline.
HdivProjection phd_apply(MeshContext& ctx, const FieldInput& w,
                         const PipelineConfig& cfg);

/// Shared helpers (also used by the H(curl) pipeline).
VPoly field_vpoly(MeshContext& ctx, const FieldInput& w, int element);
bool field_is_discrete(const FieldInput& w);
Eigen::VectorXd project_field(MeshContext& ctx, const FieldInput& w,
                              int element, Family f, int q,
                              const PipelineConfig& cfg);
/// Coefficients of Pi_h^q(psi_a div w + grad(psi_a) . w) on an element
/// (`with_div_term` = false drops the psi_a div w part).
Eigen::VectorXd hat_divergence_rhs(MeshContext& ctx, const FieldInput& w,
                                   int element, int vertex, int q,
                                   const PipelineConfig& cfg,
                                   bool with_div_term, double sign = 1.0);

void record_check(std::vector<CheckRecord>& checks, const std::string& name,
                  int entity, double residual, double scale, double tol,
                  bool throw_on_fail);

}  // namespace cpj

#endif
