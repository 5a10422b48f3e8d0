// Measured stability and approximation surrogates of the projectors: the
// per-element ratios between the projection error (or norm) and the
// local-best/oscillation data collected over a two-ring element
// neighborhood. The hidden constants of the estimates are not asserted;
// the ratios are reported and checked for stability across refinement.
#ifndef COMMUTEPROJ_SURROGATES_HPP
#define COMMUTEPROJ_SURROGATES_HPP

#include "commuteproj/globalbest.hpp"
#include "commuteproj/hcurl_proj.hpp"

namespace cpj {

struct SurrogateReport {
  // ratio of ||v - P(v)||_K^2 + (h_K/(p+1) ||curl(v - P(v))||_K)^2 to the
  // two-ring local-best + oscillation sum
  std::vector<double> approx_ratio;
  // ratio of ||P(v)||_K^2 to the two-ring sum of ||v||^2 + oscillation^2
  std::vector<double> stability_ratio;
  // ratio of ||P(v)||_K^2 + h_Omega^2 ||curl P(v)||_K^2 to the two-ring sum
  // of ||v||^2 + h_Omega^2 ||curl v||^2
  std::vector<double> stability_curl_ratio;
  double max_approx = 0.0;
  double max_stability = 0.0;
  double max_stability_curl = 0.0;
};

/// Two rounds of vertex adjacency around each element.
std::vector<std::vector<int>> two_ring_neighborhoods(const TetMesh& mesh);

SurrogateReport hcurl_surrogates(MeshContext& ctx, const HcurlProjection& proj,
                                 const FieldInput& v,
                                 const PipelineConfig& cfg);

/// H(div) analogue: ||sigma||_K^2 against the one-ring data of w.
struct HdivSurrogateReport {
  std::vector<double> stability_ratio;
  double max_stability = 0.0;
};
HdivSurrogateReport hdiv_surrogates(MeshContext& ctx,
                                    const HdivProjection& proj,
                                    const FieldInput& w,
                                    const PipelineConfig& cfg);

}  // namespace cpj

#endif
