#include "commuteproj/brokenops.hpp"

#include <algorithm>
#include <set>

namespace cpj {

BrokenField broken_curl(MeshContext& ctx, const BrokenField& v) {
  if (v.family != Family::ND)
    throw std::invalid_argument("broken_curl: field family does not support "
                                "the curl map (need ND)");
  BrokenField out;
  out.family = Family::RT;
  out.q = v.q;
  out.coef.resize(v.coef.size());
  for (int k = 0; k < static_cast<int>(v.coef.size()); ++k)
    if (v.coef[k].size()) out.coef[k] = ctx.curl_matrix(k, v.q) * v.coef[k];
  return out;
}

BrokenField broken_div(MeshContext& ctx, const BrokenField& v) {
  if (v.family != Family::RT)
    throw std::invalid_argument("broken_div: field family does not support "
                                "the divergence map (need RT)");
  BrokenField out;
  out.family = Family::P;
  out.q = v.q;
  out.coef.resize(v.coef.size());
  for (int k = 0; k < static_cast<int>(v.coef.size()); ++k)
    if (v.coef[k].size()) out.coef[k] = ctx.div_matrix(k, v.q) * v.coef[k];
  return out;
}

double face_jump_l2(MeshContext& ctx, const BrokenField& v,
                    const std::vector<int>& faces, bool tangential) {
  const TetMesh& mesh = ctx.mesh();
  double sum = 0.0;
  for (int f : faces) {
    const Face& face = mesh.face(f);
    const QuadRule& rule = ctx.face_rule(f, 2 * (v.q + 2));
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(rule.size(), 3);
    double side = 1.0;
    for (int k : face.elements) {
      if (k < 0) continue;
      if (v.coef[k].size()) {
        const BasisSet& basis = ctx.basis(k, v.family, v.q);
        for (int c = 0; c < 3; ++c)
          jump.col(c) += side * (basis.values(rule.points, c) * v.coef[k]);
      }
      side = -1.0;
    }
    const Eigen::Vector3d n = face.normal;
    for (int p = 0; p < rule.size(); ++p) {
      const Eigen::Vector3d j = jump.row(p).transpose();
      const double jn = j.dot(n);
      const double contrib =
          tangential ? (j - jn * n).squaredNorm() : jn * jn;
      sum += rule.weights(p) * contrib;
    }
  }
  return std::sqrt(sum);
}

std::vector<int> conformity_faces(const TetMesh& mesh,
                                  const std::vector<int>& elements,
                                  const std::vector<int>& extra_boundary) {
  std::map<int, int> count;
  for (int k : elements)
    for (int f : mesh.tet(k).faces) count[f]++;
  std::set<int> out;
  for (const auto& [f, n] : count)
    if (n == 2) out.insert(f);
  for (int f : extra_boundary)
    if (count.count(f)) out.insert(f);
  return std::vector<int>(out.begin(), out.end());
}

}  // namespace cpj
