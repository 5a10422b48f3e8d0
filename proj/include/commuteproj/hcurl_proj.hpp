// The stable local commuting projector onto ND_p(T_h) with tangential
// conformity and boundary conditions. Six stages: curl data preparation
// through the H(div) pipeline, elementwise curl-constrained minimization,
// a vertex-patch equilibration with an extra piecewise-constant moment
// constraint, a divergence-free multilevel splitting, and the final
// patchwise curl-constrained corrections. Feasibility of every patch
// problem is asserted numerically.
#ifndef COMMUTEPROJ_HCURL_PROJ_HPP
#define COMMUTEPROJ_HCURL_PROJ_HPP

#include "commuteproj/hdiv_proj.hpp"

namespace cpj {

struct HcurlProjection {
  int degree = 0;
  Variant variant = Variant::Canonical;
  HdivProjection hdiv;              // applied to w = curl v
  BrokenField iota;                 // ND_p (ND_{p-1} in the alternative)
  std::vector<PatchField> theta_a;  // RT_{p+1} (RT_p in the alternative)
  BrokenField delta;                // sum of the theta fields
  std::vector<PatchField> delta_a;  // divergence-free splitting (canonical)
  std::vector<PatchField> h_a;      // ND_p patch outputs
  BrokenField h;                    // assembled projection
  std::vector<CheckRecord> checks;
};

/// Elementwise curl-constrained best approximation of v.
Eigen::VectorXd phc_iota_element(MeshContext& ctx, const FieldInput& v,
                                 const BrokenField& tau, int element,
                                 const PipelineConfig& cfg);

/// Patch equilibration producing theta^a; appends the feasibility
/// assertions (data regularity, mean compatibility, hat-orthogonality) to
/// `checks`.
PatchField phc_theta_patch(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& iota, const FieldInput& w,
                           const PipelineConfig& cfg,
                           std::vector<CheckRecord>& checks);

/// Divergence-free splitting of delta for one vertex (elementwise trace- and
/// divergence-pinned minimizations).
PatchField phc_delta_split(MeshContext& ctx, const VertexPatch& patch,
                           const BrokenField& delta,
                           const PipelineConfig& cfg);

/// Final patch problem producing h^a given the curl datum
/// sigma^a + I^{RT,p}(theta^a - delta^a).
PatchField phc_h_patch(MeshContext& ctx, const VertexPatch& patch,
                       const BrokenField& iota, const PatchField& sigma_a,
                       const PatchField& theta_a, const PatchField* delta_a,
                       const PipelineConfig& cfg,
                       std::vector<CheckRecord>& checks);

/// Full pipeline.
HcurlProjection phc_apply(MeshContext& ctx, const FieldInput& v,
                          const PipelineConfig& cfg);

}  // namespace cpj

#endif
