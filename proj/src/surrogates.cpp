#include "commuteproj/surrogates.hpp"

#include <set>

namespace cpj {

namespace {

std::vector<std::set<int>> one_ring_sets(const TetMesh& mesh) {
  std::vector<std::set<int>> one_ring(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int v : mesh.tet(k).v)
      for (int kk : mesh.vertex_elements(v)) one_ring[k].insert(kk);
  return one_ring;
}

}  // namespace

std::vector<std::vector<int>> two_ring_neighborhoods(const TetMesh& mesh) {
  const auto one_ring = one_ring_sets(mesh);
  std::vector<std::vector<int>> out(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    std::set<int> two_ring;
    for (int kk : one_ring[k])
      two_ring.insert(one_ring[kk].begin(), one_ring[kk].end());
    out[k].assign(two_ring.begin(), two_ring.end());
  }
  return out;
}

SurrogateReport hcurl_surrogates(MeshContext& ctx, const HcurlProjection& proj,
                                 const FieldInput& v,
                                 const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const int p = proj.degree;
  const int qd = cfg.analytic_quad(p);
  const auto rings = two_ring_neighborhoods(mesh);
  const LocalBestReport local = localbest_sum(ctx, v, p, cfg);

  // Domain diameter from the vertex bounding box diagonal (adequate for the
  // convex generator domains; only a reporting weight).
  Eigen::Vector3d lo = mesh.node(0), hi = mesh.node(0);
  for (int a = 0; a < mesh.num_vertices(); ++a) {
    lo = lo.cwiseMin(mesh.node(a));
    hi = hi.cwiseMax(mesh.node(a));
  }
  const double homega = (hi - lo).norm();

  SurrogateReport rep;
  rep.approx_ratio.resize(mesh.num_elements());
  rep.stability_ratio.resize(mesh.num_elements());
  rep.stability_curl_ratio.resize(mesh.num_elements());

  std::vector<double> vnorm2(mesh.num_elements()), curlnorm2(mesh.num_elements());
  std::vector<double> perr2(mesh.num_elements()), pcerr2(mesh.num_elements());
  std::vector<double> pnorm2(mesh.num_elements()), pcnorm2(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    vnorm2[k] = element_error2(ctx, v, k, Family::ND, p, Eigen::VectorXd(), qd,
                               false);
    curlnorm2[k] = element_error2(ctx, v, k, Family::RT, p, Eigen::VectorXd(),
                                  qd, true);
    perr2[k] = element_error2(ctx, v, k, Family::ND, p, proj.h.coef[k], qd,
                              false);
    const Eigen::VectorXd curlh = ctx.curl_matrix(k, p) * proj.h.coef[k];
    pcerr2[k] = element_error2(ctx, v, k, Family::RT, p, curlh, qd, true);
    pnorm2[k] = proj.h.coef[k].squaredNorm();
    pcnorm2[k] = curlh.squaredNorm();
  }

  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double wk = mesh.tet(k).diameter / (p + 1);
    double best = 0.0, data = 0.0, data_curl = 0.0;
    for (int kk : rings[k]) {
      best += local.localbest2[kk] + local.osc2[kk];
      data += vnorm2[kk] + local.osc2[kk];
      data_curl += vnorm2[kk] + homega * homega * curlnorm2[kk];
    }
    const double tiny = 1e-300;
    rep.approx_ratio[k] = (perr2[k] + wk * wk * pcerr2[k]) / (best + tiny);
    rep.stability_ratio[k] = pnorm2[k] / (data + tiny);
    rep.stability_curl_ratio[k] =
        (pnorm2[k] + homega * homega * pcnorm2[k]) / (data_curl + tiny);
    rep.max_approx = std::max(rep.max_approx, rep.approx_ratio[k]);
    rep.max_stability = std::max(rep.max_stability, rep.stability_ratio[k]);
    rep.max_stability_curl =
        std::max(rep.max_stability_curl, rep.stability_curl_ratio[k]);
  }
  return rep;
}

HdivSurrogateReport hdiv_surrogates(MeshContext& ctx,
                                    const HdivProjection& proj,
                                    const FieldInput& w,
                                    const PipelineConfig& cfg) {
  const TetMesh& mesh = ctx.mesh();
  const int p = proj.degree;
  const int qd = cfg.analytic_quad(p);
  // One vertex ring suffices for the H(div) stability statement.
  const auto ring_sets = one_ring_sets(mesh);
  std::vector<std::vector<int>> rings(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k)
    rings[k].assign(ring_sets[k].begin(), ring_sets[k].end());

  HdivSurrogateReport rep;
  rep.stability_ratio.resize(mesh.num_elements());
  std::vector<double> wnorm2(mesh.num_elements()), osc2(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    wnorm2[k] = element_error2(ctx, w, k, Family::RT, p, Eigen::VectorXd(), qd,
                               false);
    const Eigen::VectorXd wproj =
        field_is_discrete(w)
            ? l2_project(ctx, k, Family::RT, p, ctx.field_on_element(*w.discrete, k))
            : l2_project(ctx, k, Family::RT, p, w.analytic->value, qd);
    const double wk = mesh.tet(k).diameter / (p + 1);
    osc2[k] = wk * wk *
              element_error2(ctx, w, k, Family::RT, p, wproj, qd, false);
  }
  for (int k = 0; k < mesh.num_elements(); ++k) {
    double data = 0.0;
    for (int kk : rings[k]) data += wnorm2[kk] + osc2[kk];
    rep.stability_ratio[k] =
        proj.sigma.coef[k].squaredNorm() / (data + 1e-300);
    rep.max_stability = std::max(rep.max_stability, rep.stability_ratio[k]);
  }
  return rep;
}

}  // namespace cpj
