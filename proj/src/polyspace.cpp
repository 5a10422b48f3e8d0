#include "commuteproj/polyspace.hpp"

#include <stdexcept>

namespace cpj {

const char* family_name(Family f) {
  switch (f) {
    case Family::P: return "P";
    case Family::Pvec: return "Pvec";
    case Family::ND: return "ND";
    case Family::RT: return "RT";
  }
  return "?";
}

int space_dimension(Family f, int q) {
  if (q < 0) throw std::invalid_argument("space_dimension: q must be >= 0");
  const int pdim = (q + 1) * (q + 2) * (q + 3) / 6;
  switch (f) {
    case Family::P: return pdim;
    case Family::Pvec: return 3 * pdim;
    case Family::ND: return (q + 1) * (q + 3) * (q + 4) / 2;
    case Family::RT: return (q + 1) * (q + 2) * (q + 4) / 2;
  }
  throw std::invalid_argument("space_dimension: unsupported family");
}

Frame element_frame(const TetMesh& mesh, int element) {
  const Tet& t = mesh.tet(element);
  return Frame{t.centroid, 0.5 * t.diameter};
}

Eigen::MatrixXd BasisSet::values(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts, int component) const {
  const Eigen::MatrixXd mono = monomial::values(frame, mono_degree, pts);
  return mono * coef[family == Family::P ? 0 : component];
}

VPoly BasisSet::combination(const Eigen::VectorXd& c) const {
  VPoly out(frame, mono_degree);
  for (int comp = 0; comp < 3; ++comp) out[comp].coef() = coef[comp] * c;
  return out;
}

Poly BasisSet::scalar_combination(const Eigen::VectorXd& c) const {
  return Poly(frame, mono_degree, coef[0] * c);
}

std::vector<Eigen::MatrixXd> orthonormalize_span(
    const std::vector<Eigen::MatrixXd>& comp_coef, const Frame& frame,
    int mono_degree, const QuadRule& rule, int expected_rank) {
  const int ncomp = static_cast<int>(comp_coef.size());
  const int m = static_cast<int>(comp_coef[0].cols());
  const Eigen::MatrixXd mono = monomial::values(frame, mono_degree, rule.points);

  auto gram_of = [&](const std::vector<Eigen::MatrixXd>& cc) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(cc[0].cols(), cc[0].cols());
    for (int c = 0; c < ncomp; ++c) {
      const Eigen::MatrixXd v = mono * cc[c];
      g.noalias() += v.transpose() * rule.weights.asDiagonal() * v;
    }
    return g;
  };

  // Unit-normalize the spanning functions first; exact dependencies stay
  // exact and the rank gap widens on stretched elements.
  Eigen::MatrixXd G = gram_of(comp_coef);
  const Eigen::VectorXd dn = G.diagonal().cwiseSqrt().cwiseInverse();
  G = dn.asDiagonal() * G * dn.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double lmax = es.eigenvalues().maxCoeff();
  const double cutoff = 1e-13 * lmax;
  int rank = 0;
  for (int i = 0; i < m; ++i)
    if (es.eigenvalues()(i) > cutoff) ++rank;
  if (rank != expected_rank)
    throw std::runtime_error("orthonormalize_span: rank deficiency (got " +
                             std::to_string(rank) + ", expected " +
                             std::to_string(expected_rank) + ")");
  Eigen::MatrixXd T(m, rank);
  for (int i = 0; i < rank; ++i) {
    const int j = m - rank + i;  // eigenvalues ascending; take the top ones
    T.col(i) = dn.asDiagonal() * es.eigenvectors().col(j) /
               std::sqrt(es.eigenvalues()(j));
  }
  std::vector<Eigen::MatrixXd> stage1(ncomp);
  for (int c = 0; c < ncomp; ++c) stage1[c] = comp_coef[c] * T;

  // Second pass: the measured Gram of the first pass is I + O(eps*cond);
  // a Cholesky correction restores orthonormality to machine level.
  const Eigen::MatrixXd G1 = gram_of(stage1);
  const Eigen::LLT<Eigen::MatrixXd> llt(G1);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("orthonormalize_span: refinement Cholesky failed");
  std::vector<Eigen::MatrixXd> out(ncomp);
  const Eigen::MatrixXd Linv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(rank, rank));
  for (int c = 0; c < ncomp; ++c) out[c] = stage1[c] * Linv.transpose();
  return out;
}

BasisSet build_basis(const TetMesh& mesh, int element, Family f, int q,
                     const QuadRule& rule) {
  if (q < 0) throw std::invalid_argument("build_basis: q must be >= 0");
  BasisSet b;
  b.family = f;
  b.q = q;
  b.element = element;
  b.frame = element_frame(mesh, element);

  const int pdim = monomial::dimension(q);
  const auto& exps = monomial::exponents(q + 1);

  if (f == Family::P) {
    b.mono_degree = q;
    std::vector<Eigen::MatrixXd> cc = {Eigen::MatrixXd::Identity(pdim, pdim)};
    cc = orthonormalize_span(cc, b.frame, q, rule, pdim);
    b.coef[0] = cc[0];
    b.coef[1] = b.coef[2] = Eigen::MatrixXd::Zero(pdim, pdim);
    b.sca.reserve(pdim);
    for (int j = 0; j < pdim; ++j)
      b.sca.emplace_back(b.frame, q, Eigen::VectorXd(cc[0].col(j)));
    return b;
  }

  const int mono_deg = (f == Family::Pvec) ? q : q + 1;
  const int mdim = monomial::dimension(mono_deg);
  b.mono_degree = mono_deg;

  // Generating set: [P_q]^3 columns, then the degree-raising part
  // (x-weighted homogeneous monomials for RT, cross products for ND).
  std::vector<Eigen::MatrixXd> cc(3);
  int ncols = 3 * pdim;
  const int hdim = (q + 1) * (q + 2) / 2;  // homogeneous degree-q monomials
  if (f == Family::RT) ncols += hdim;
  if (f == Family::ND) ncols += 3 * hdim;
  for (int c = 0; c < 3; ++c) cc[c] = Eigen::MatrixXd::Zero(mdim, ncols);

  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < pdim; ++j) cc[c](j, c * pdim + j) = 1.0;

  const int hstart = monomial::dimension(q - 1);  // first degree-q monomial
  if (f == Family::RT) {
    for (int h = 0; h < hdim; ++h) {
      const auto e = exps[hstart + h];
      // u^e * u: component c gets the monomial with exponent e + e_c.
      for (int c = 0; c < 3; ++c) {
        std::array<int, 3> ec = e;
        ec[c] += 1;
        cc[c](monomial::index(ec[0], ec[1], ec[2]), 3 * pdim + h) = 1.0;
      }
    }
  } else if (f == Family::ND) {
    for (int c = 0; c < 3; ++c) {
      // u x (m e_c) = m * (u x e_c); u x e_c has components eps(i,?,c)*u_?
      for (int h = 0; h < hdim; ++h) {
        const auto e = exps[hstart + h];
        const int col = 3 * pdim + c * hdim + h;
        const int i1 = (c + 1) % 3, i2 = (c + 2) % 3;
        // u x e_c = u_{c+2} e_{c+1} - u_{c+1} e_{c+2} (cyclic indices)
        std::array<int, 3> ea = e, eb = e;
        ea[i2] += 1;  // monomial m*u_{i2} goes to component i1
        eb[i1] += 1;  // monomial m*u_{i1} goes to component i2 (negative)
        cc[i1](monomial::index(ea[0], ea[1], ea[2]), col) += 1.0;
        cc[i2](monomial::index(eb[0], eb[1], eb[2]), col) -= 1.0;
      }
    }
  }

  cc = orthonormalize_span(cc, b.frame, mono_deg, rule, space_dimension(f, q));
  for (int c = 0; c < 3; ++c) b.coef[c] = cc[c];
  const int n = static_cast<int>(cc[0].cols());
  b.vec.reserve(n);
  for (int j = 0; j < n; ++j)
    b.vec.emplace_back(Poly(b.frame, mono_deg, Eigen::VectorXd(cc[0].col(j))),
                       Poly(b.frame, mono_deg, Eigen::VectorXd(cc[1].col(j))),
                       Poly(b.frame, mono_deg, Eigen::VectorXd(cc[2].col(j))));
  return b;
}

namespace {
double weighted_norm2(const Eigen::MatrixXd& vals, const Eigen::VectorXd& w) {
  return w.dot(vals.rowwise().squaredNorm());
}
}  // namespace

Eigen::VectorXd coefficients_in_basis(const BasisSet& basis, const VPoly& f,
                                      const QuadRule& rule,
                                      bool require_member) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  Eigen::MatrixXd fvals = f.eval(rule.points);
  for (int comp = 0; comp < 3; ++comp) {
    const Eigen::MatrixXd bv = basis.values(rule.points, comp);
    c.noalias() +=
        bv.transpose() * (rule.weights.cwiseProduct(fvals.col(comp)));
  }
  if (require_member) {
    const double n2 = weighted_norm2(fvals, rule.weights);
    const double r2 = n2 - c.squaredNorm();
    if (r2 > 1e-20 + 1e-20 * n2 && r2 > 1e-12 * n2)
      throw std::runtime_error("coefficients_in_basis: field not in space");
  }
  return c;
}

Eigen::VectorXd coefficients_in_basis(const BasisSet& basis, const Poly& f,
                                      const QuadRule& rule,
                                      bool require_member) {
  const Eigen::VectorXd fvals = f.eval(rule.points);
  const Eigen::MatrixXd bv = basis.values(rule.points, 0);
  Eigen::VectorXd c = bv.transpose() * rule.weights.cwiseProduct(fvals);
  if (require_member) {
    const double n2 = rule.weights.dot(fvals.cwiseAbs2());
    const double r2 = n2 - c.squaredNorm();
    if (r2 > 1e-20 + 1e-12 * n2)
      throw std::runtime_error("coefficients_in_basis: field not in space");
  }
  return c;
}

double BrokenField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coef) s += c.squaredNorm();
  return std::sqrt(s);
}

BrokenField BrokenField::zeros(Family f, int q, int num_elements, int dim) {
  BrokenField b;
  b.family = f;
  b.q = q;
  b.coef.assign(num_elements, Eigen::VectorXd::Zero(dim));
  return b;
}

}  // namespace cpj
