#include "commuteproj/context.hpp"

#include <stdexcept>

namespace cpj {

namespace {
int bucket(int degree) { return degree + (degree & 1); }  // round up to even
}

const QuadRule& MeshContext::tet_rule(int element, int degree) {
  const int d = bucket(degree);
  auto key = std::make_pair(element, d);
  auto it = tet_rules_.find(key);
  if (it == tet_rules_.end()) {
    const auto& tv = mesh_.tet(element).v;
    it = tet_rules_
             .emplace(key, cpj::tet_rule(mesh_.node(tv[0]), mesh_.node(tv[1]),
                                           mesh_.node(tv[2]), mesh_.node(tv[3]), d))
             .first;
  }
  return it->second;
}

const QuadRule& MeshContext::face_rule(int face, int degree) {
  const int d = bucket(degree);
  auto key = std::make_pair(face, d);
  auto it = face_rules_.find(key);
  if (it == face_rules_.end()) {
    const auto& fv = mesh_.face(face).v;
    it = face_rules_
             .emplace(key, cpj::tri_rule(mesh_.node(fv[0]), mesh_.node(fv[1]),
                                           mesh_.node(fv[2]), d))
             .first;
  }
  return it->second;
}

const QuadRule& MeshContext::edge_rule(int edge, int degree) {
  const int d = bucket(degree);
  auto key = std::make_pair(edge, d);
  auto it = edge_rules_.find(key);
  if (it == edge_rules_.end()) {
    const auto& ev = mesh_.edge(edge).v;
    it = edge_rules_
             .emplace(key, cpj::seg_rule(mesh_.node(ev[0]), mesh_.node(ev[1]), d))
             .first;
  }
  return it->second;
}

const BasisSet& MeshContext::basis(int element, Family f, int q) {
  auto key = std::make_tuple(element, static_cast<int>(f), q);
  auto it = bases_.find(key);
  if (it == bases_.end()) {
    const QuadRule& rule = tet_rule(element, 2 * (q + 1));
    it = bases_.emplace(key, build_basis(mesh_, element, f, q, rule)).first;
  }
  return it->second;
}

FaceGeom MeshContext::face_geom(int face) const {
  const Face& f = mesh_.face(face);
  FaceGeom g;
  const Eigen::Vector3d a = mesh_.node(f.v[0]), b = mesh_.node(f.v[1]),
                        c = mesh_.node(f.v[2]);
  g.origin = (a + b + c) / 3.0;
  g.t1 = (b - a).normalized();
  g.normal = f.normal;
  g.t2 = f.normal.cross(g.t1);
  g.scale = 0.5 * std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
  return g;
}

Eigen::Vector3d MeshContext::edge_tangent(int edge) const {
  const Edge& e = mesh_.edge(edge);
  return (mesh_.node(e.v[1]) - mesh_.node(e.v[0])).normalized();
}

const EntityBasis& MeshContext::face_scalar_basis(int face, int q) {
  auto key = std::make_pair(face, q);
  auto it = face_bases_.find(key);
  if (it != face_bases_.end()) return it->second;

  const FaceGeom g = face_geom(face);
  EntityBasis eb;
  eb.frame = Frame{g.origin, g.scale};
  const Poly s1 = Poly::affine(eb.frame, 0.0, g.t1 / g.scale, g.origin);
  const Poly s2 = Poly::affine(eb.frame, 0.0, g.t2 / g.scale, g.origin);
  // All in-face monomials s1^i s2^j, i+j <= q.
  std::vector<Poly> monos;
  std::vector<Poly> pow1(q + 1), pow2(q + 1);
  pow1[0] = pow2[0] = Poly(eb.frame, 0);
  pow1[0].coef()(0) = 1.0;
  pow2[0].coef()(0) = 1.0;
  for (int k = 1; k <= q; ++k) {
    pow1[k] = pow1[k - 1] * s1;
    pow2[k] = pow2[k - 1] * s2;
  }
  for (int t = 0; t <= q; ++t)
    for (int i = t; i >= 0; --i) monos.push_back(pow1[i] * pow2[t - i]);

  const int n = static_cast<int>(monos.size());
  std::vector<Eigen::MatrixXd> cc = {
      Eigen::MatrixXd::Zero(monomial::dimension(q), n)};
  for (int j = 0; j < n; ++j)
    cc[0].col(j).head(monos[j].coef().size()) = monos[j].coef();
  cc = orthonormalize_span(cc, eb.frame, q, face_rule(face, 2 * q), n);
  for (int j = 0; j < n; ++j)
    eb.funcs.emplace_back(eb.frame, q, Eigen::VectorXd(cc[0].col(j)));
  return face_bases_.emplace(key, std::move(eb)).first->second;
}

const EntityBasis& MeshContext::edge_scalar_basis(int edge, int q) {
  auto key = std::make_pair(edge, q);
  auto it = edge_bases_.find(key);
  if (it != edge_bases_.end()) return it->second;

  const Edge& e = mesh_.edge(edge);
  const Eigen::Vector3d a = mesh_.node(e.v[0]), b = mesh_.node(e.v[1]);
  EntityBasis eb;
  eb.frame = Frame{0.5 * (a + b), 0.5 * (b - a).norm()};
  const Eigen::Vector3d t = (b - a).normalized();
  const Poly s = Poly::affine(eb.frame, 0.0, t / eb.frame.scale, eb.frame.center);
  std::vector<Poly> monos(q + 1);
  monos[0] = Poly(eb.frame, 0);
  monos[0].coef()(0) = 1.0;
  for (int k = 1; k <= q; ++k) monos[k] = monos[k - 1] * s;

  std::vector<Eigen::MatrixXd> cc = {
      Eigen::MatrixXd::Zero(monomial::dimension(q), q + 1)};
  for (int j = 0; j <= q; ++j)
    cc[0].col(j).head(monos[j].coef().size()) = monos[j].coef();
  cc = orthonormalize_span(cc, eb.frame, q, edge_rule(edge, 2 * q), q + 1);
  for (int j = 0; j <= q; ++j)
    eb.funcs.emplace_back(eb.frame, q, Eigen::VectorXd(cc[0].col(j)));
  return edge_bases_.emplace(key, std::move(eb)).first->second;
}

namespace {

// Assembles the canonical DOF list of ND_q / RT_q on one element.
CanonicalSystem make_canonical(MeshContext& ctx, int element, Family f, int q) {
  const TetMesh& mesh = ctx.mesh();
  const Tet& tet = mesh.tet(element);
  CanonicalSystem sys;
  sys.family = f;
  sys.q = q;
  sys.element = element;

  auto open_block = [&](DofDomain d, int entity) {
    sys.blocks.push_back({d, entity, static_cast<int>(sys.dofs.size()), -1});
  };
  auto close_block = [&]() {
    sys.blocks.back().end = static_cast<int>(sys.dofs.size());
  };

  if (f == Family::ND) {
    for (int le = 0; le < 6; ++le) {
      const int e = tet.edges[le];
      const EntityBasis& eb = ctx.edge_scalar_basis(e, q);
      const Eigen::Vector3d t = ctx.edge_tangent(e);
      open_block(DofDomain::Edge, e);
      for (const Poly& w : eb.funcs)
        sys.dofs.push_back({DofDomain::Edge, e, w, t});
      close_block();
    }
    if (q >= 1) {
      for (int lf = 0; lf < 4; ++lf) {
        const int fc = tet.faces[lf];
        const EntityBasis& fb = ctx.face_scalar_basis(fc, q - 1);
        const FaceGeom g = ctx.face_geom(fc);
        open_block(DofDomain::Face, fc);
        for (const Poly& w : fb.funcs) {
          sys.dofs.push_back({DofDomain::Face, fc, w, g.t1});
          sys.dofs.push_back({DofDomain::Face, fc, w, g.t2});
        }
        close_block();
      }
    }
    if (q >= 2) {
      const BasisSet& pb = ctx.basis(element, Family::P, q - 2);
      open_block(DofDomain::Volume, element);
      for (const Poly& w : pb.sca)
        for (int c = 0; c < 3; ++c)
          sys.dofs.push_back(
              {DofDomain::Volume, element, w, Eigen::Vector3d::Unit(c)});
      close_block();
    }
  } else if (f == Family::RT) {
    for (int lf = 0; lf < 4; ++lf) {
      const int fc = tet.faces[lf];
      const EntityBasis& fb = ctx.face_scalar_basis(fc, q);
      const Eigen::Vector3d n = mesh.face(fc).normal;
      open_block(DofDomain::Face, fc);
      for (const Poly& w : fb.funcs)
        sys.dofs.push_back({DofDomain::Face, fc, w, n});
      close_block();
    }
    if (q >= 1) {
      const BasisSet& pb = ctx.basis(element, Family::P, q - 1);
      open_block(DofDomain::Volume, element);
      for (const Poly& w : pb.sca)
        for (int c = 0; c < 3; ++c)
          sys.dofs.push_back(
              {DofDomain::Volume, element, w, Eigen::Vector3d::Unit(c)});
      close_block();
    }
  } else {
    throw std::invalid_argument("canonical: family must be ND or RT");
  }

  const BasisSet& basis = ctx.basis(element, f, q);
  if (static_cast<int>(sys.dofs.size()) != basis.size())
    throw std::logic_error("canonical: dof count does not match dimension");

  sys.A.resize(basis.size(), basis.size());
  for (const auto& blk : sys.blocks) {
    const QuadRule& rule =
        blk.domain == DofDomain::Edge
            ? ctx.edge_rule(blk.entity, 2 * q + 2)
            : (blk.domain == DofDomain::Face ? ctx.face_rule(blk.entity, 2 * q + 2)
                                             : ctx.tet_rule(blk.entity, 2 * q + 2));
    Eigen::MatrixXd bv[3];
    for (int c = 0; c < 3; ++c) bv[c] = basis.values(rule.points, c);
    for (int i = blk.begin; i < blk.end; ++i) {
      const DofFunctional& dof = sys.dofs[i];
      const Eigen::VectorXd wv =
          dof.weight.eval(rule.points).cwiseProduct(rule.weights);
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(basis.size());
      for (int c = 0; c < 3; ++c)
        if (dof.dir(c) != 0.0) row += dof.dir(c) * (wv.transpose() * bv[c]);
      sys.A.row(i) = row;
    }
  }
  sys.lu.compute(sys.A);
  const Eigen::VectorXd du = sys.lu.matrixLU().diagonal().cwiseAbs();
  if (du.minCoeff() <= 1e-13 * du.maxCoeff())
    throw std::runtime_error("canonical: DOF system near-singular");
  return sys;
}

}  // namespace

const CanonicalSystem& MeshContext::canonical(int element, Family f, int q) {
  auto key = std::make_tuple(element, static_cast<int>(f), q);
  auto it = canonical_.find(key);
  if (it == canonical_.end())
    it = canonical_.emplace(key, make_canonical(*this, element, f, q)).first;
  return it->second;
}

const Eigen::MatrixXd& MeshContext::curl_matrix(int element, int q) {
  auto key = std::make_pair(element, q);
  auto it = curl_maps_.find(key);
  if (it == curl_maps_.end()) {
    const BasisSet& nd = basis(element, Family::ND, q);
    const BasisSet& rt = basis(element, Family::RT, q);
    const QuadRule& rule = tet_rule(element, 2 * (q + 1));
    Eigen::MatrixXd C(rt.size(), nd.size());
    for (int j = 0; j < nd.size(); ++j)
      C.col(j) = coefficients_in_basis(rt, nd.vec[j].curl(), rule, true);
    it = curl_maps_.emplace(key, std::move(C)).first;
  }
  return it->second;
}

const Eigen::MatrixXd& MeshContext::div_matrix(int element, int q) {
  auto key = std::make_pair(element, q);
  auto it = div_maps_.find(key);
  if (it == div_maps_.end()) {
    const BasisSet& rt = basis(element, Family::RT, q);
    const BasisSet& p = basis(element, Family::P, q);
    const QuadRule& rule = tet_rule(element, 2 * (q + 1));
    Eigen::MatrixXd D(p.size(), rt.size());
    for (int j = 0; j < rt.size(); ++j)
      D.col(j) = coefficients_in_basis(p, rt.vec[j].div(), rule, true);
    it = div_maps_.emplace(key, std::move(D)).first;
  }
  return it->second;
}

Poly MeshContext::hat_poly(int element, int vertex) const {
  const Eigen::Vector3d g = hat_gradient(element, vertex);
  return Poly::affine(element_frame(mesh_, element), 1.0, g, mesh_.node(vertex));
}

Eigen::Vector3d MeshContext::hat_gradient(int element, int vertex) const {
  const auto& tv = mesh_.tet(element).v;
  for (int lv = 0; lv < 4; ++lv)
    if (tv[lv] == vertex) return mesh_.barycentric_gradient(element, lv);
  throw std::runtime_error("hat_gradient: vertex not in element");
}

VPoly MeshContext::field_on_element(const BrokenField& field, int element) {
  return basis(element, field.family, field.q).combination(field.coef[element]);
}

}  // namespace cpj
