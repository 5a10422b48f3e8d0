// Independent test oracles: closed-form simplex integrals, the dense
// pseudo-inverse KKT route, Gram-rank dimension counting from the raw
// generating sets, and seeded random tetrahedra / polynomial fields.
#ifndef COMMUTEPROJ_TESTS_ORACLE_UTILS_HPP
#define COMMUTEPROJ_TESTS_ORACLE_UTILS_HPP

#include <random>

#include "commuteproj/context.hpp"

namespace oracle {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// integral over the unit tetrahedron of x^a y^b z^c.
inline double reftet_monomial_integral(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) /
         factorial(a + b + c + 3);
}

/// integral over the unit triangle {x,y>=0, x+y<=1} of x^a y^b.
inline double reftri_monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

/// Minimizer of 1/2 x^T M x - b^T x s.t. C x = d through the Moore-Penrose
/// pseudo-inverse of the full KKT block matrix (eigendecomposition route,
/// independent of the production nullspace-QR solver).
inline Eigen::VectorXd pinv_kkt(const Eigen::MatrixXd& M,
                                const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& C,
                                const Eigen::VectorXd& d) {
  const int n = static_cast<int>(M.rows());
  const int m = static_cast<int>(C.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = M;
  K.topRightCorner(n, m) = C.transpose();
  K.bottomLeftCorner(m, n) = C;
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = b;
  rhs.tail(m) = d;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd y = es.eigenvectors().transpose() * rhs;
  for (int i = 0; i < n + m; ++i) {
    const double l = es.eigenvalues()(i);
    y(i) = std::abs(l) > 1e-12 * lmax ? y(i) / l : 0.0;
  }
  return (es.eigenvectors() * y).head(n);
}

/// Rank of the L2 Gram of the full generating sets of the Nedelec /
/// Raviart-Thomas spaces ([P_q]^3 + x cross [P_q]^3, resp. [P_q]^3 + P_q x).
inline int generating_set_rank(cpj::MeshContext& ctx, int element,
                               cpj::Family f, int q) {
  using namespace cpj;
  const Frame frame = element_frame(ctx.mesh(), element);
  const int pdim = monomial::dimension(q);
  const auto& exps = monomial::exponents(q + 1);
  const int extra = f == Family::ND ? 3 * pdim : pdim;
  const int ncols = 3 * pdim + extra;
  const int mdim = monomial::dimension(q + 1);
  std::vector<Eigen::MatrixXd> cc(3, Eigen::MatrixXd::Zero(mdim, ncols));
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < pdim; ++j) cc[c](j, c * pdim + j) = 1.0;
  for (int j = 0; j < pdim; ++j) {
    const auto e = exps[j];
    if (f == Family::RT) {
      for (int c = 0; c < 3; ++c) {
        std::array<int, 3> ec = e;
        ec[c] += 1;
        cc[c](monomial::index(ec[0], ec[1], ec[2]), 3 * pdim + j) += 1.0;
      }
    } else {
      for (int c = 0; c < 3; ++c) {
        const int col = 3 * pdim + c * pdim + j;
        const int i1 = (c + 1) % 3, i2 = (c + 2) % 3;
        std::array<int, 3> ea = e, eb = e;
        ea[i2] += 1;
        eb[i1] += 1;
        cc[i1](monomial::index(ea[0], ea[1], ea[2]), col) += 1.0;
        cc[i2](monomial::index(eb[0], eb[1], eb[2]), col) -= 1.0;
      }
    }
  }
  const QuadRule& rule = ctx.tet_rule(element, 2 * (q + 1));
  const Eigen::MatrixXd mono = monomial::values(frame, q + 1, rule.points);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ncols, ncols);
  for (int c = 0; c < 3; ++c) {
    const Eigen::MatrixXd v = mono * cc[c];
    G += v.transpose() * rule.weights.asDiagonal() * v;
  }
  // Unit-normalize the generating functions: the exact kernel stays exact
  // while the genuine spectrum tightens, giving a clean rank gap.
  const Eigen::VectorXd d = G.diagonal().cwiseSqrt().cwiseInverse();
  G = d.asDiagonal() * G * d.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double lmax = es.eigenvalues().maxCoeff();
  int rank = 0;
  for (int i = 0; i < ncols; ++i)
    if (es.eigenvalues()(i) > 1e-10 * lmax) ++rank;
  return rank;
}

/// Seeded random tetrahedron with shape regularity below `max_kappa`.
inline cpj::TetMesh random_tet(std::mt19937_64& rng, double max_kappa = 10.0) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (;;) {
    std::vector<Eigen::Vector3d> nodes(4);
    for (auto& p : nodes) p = Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
    const double vol6 = (nodes[1] - nodes[0])
                            .cross(nodes[2] - nodes[0])
                            .dot(nodes[3] - nodes[0]);
    if (std::abs(vol6) < 1e-2) continue;
    std::vector<std::array<int, 4>> tets = {{0, 1, 2, 3}};
    if (vol6 < 0) tets[0] = {0, 1, 3, 2};
    try {
      cpj::TetMesh mesh = [&] {
        std::vector<std::pair<std::array<int, 3>, cpj::BoundaryTag>> tags;
        for (const auto f : {std::array<int, 3>{1, 2, 3}, {0, 2, 3}, {0, 1, 3},
                             {0, 1, 2}})
          tags.push_back({f, cpj::BoundaryTag::Dirichlet});
        return cpj::TetMesh(nodes, tets, tags);
      }();
      if (mesh.shape_regularity() <= max_kappa) return mesh;
    } catch (const std::exception&) {
      continue;
    }
  }
}

/// Random vector polynomial of total degree <= d on the given frame.
inline cpj::VPoly random_vpoly(std::mt19937_64& rng, const cpj::Frame& frame,
                                 int d) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  cpj::VPoly v(frame, d);
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < cpj::monomial::dimension(d); ++m)
      v[c].coef()(m) = uni(rng);
  return v;
}

}  // namespace oracle

#endif
