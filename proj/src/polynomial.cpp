#include "commuteproj/polynomial.hpp"

#include <mutex>
#include <stdexcept>

namespace cpj {

namespace monomial {

int dimension(int d) { return (d + 1) * (d + 2) * (d + 3) / 6; }

namespace {
constexpr int kMaxPolyDegree = 32;
}

const std::vector<std::array<int, 3>>& exponents(int d) {
  // Built once for all degrees; the first dimension(d) entries are exactly
  // the degree <= d monomials (graded order), so callers can share the table.
  static const std::vector<std::array<int, 3>> table = [] {
    std::vector<std::array<int, 3>> t;
    t.reserve(dimension(kMaxPolyDegree));
    for (int deg = 0; deg <= kMaxPolyDegree; ++deg)
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b) t.push_back({a, b, deg - a - b});
    return t;
  }();
  if (d > kMaxPolyDegree)
    throw std::invalid_argument("monomial::exponents: degree too large");
  return table;
}

int index(int a, int b, int c) {
  const int t = a + b + c;
  const int offset = t * (t + 1) * (t + 2) / 6;
  const int ta = t - a;
  return offset + ta * (ta + 1) / 2 + (ta - b);
}

Eigen::MatrixXd values(const Frame& frame, int d,
                       const Eigen::Matrix<double, Eigen::Dynamic, 3>& points) {
  const int np = static_cast<int>(points.rows());
  const int nm = dimension(d);
  const auto& exps = exponents(d);

  Eigen::MatrixXd pw[3];
  for (int axis = 0; axis < 3; ++axis) {
    pw[axis].resize(np, d + 1);
    pw[axis].col(0).setOnes();
    for (int k = 1; k <= d; ++k)
      pw[axis].col(k) =
          pw[axis].col(k - 1).cwiseProduct((points.col(axis).array() -
                                            frame.center(axis)).matrix() /
                                           frame.scale);
  }
  Eigen::MatrixXd vals(np, nm);
  for (int m = 0; m < nm; ++m)
    vals.col(m) = pw[0].col(exps[m][0]).cwiseProduct(pw[1].col(exps[m][1]))
                      .cwiseProduct(pw[2].col(exps[m][2]));
  return vals;
}

}  // namespace monomial

Poly Poly::affine(const Frame& frame, double c0, const Eigen::Vector3d& g,
                  const Eigen::Vector3d& x0) {
  // c0 + g.(x - x0) = [c0 + g.(center - x0)] + scale * g.u
  Poly p(frame, 1);
  p.coef_(0) = c0 + g.dot(frame.center - x0);
  p.coef_(monomial::index(1, 0, 0)) = frame.scale * g(0);
  p.coef_(monomial::index(0, 1, 0)) = frame.scale * g(1);
  p.coef_(monomial::index(0, 0, 1)) = frame.scale * g(2);
  return p;
}

double Poly::eval(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d u = (x - frame_.center) / frame_.scale;
  const auto& exps = monomial::exponents(degree_);
  double pwx[34], pwy[34], pwz[34];
  pwx[0] = pwy[0] = pwz[0] = 1.0;
  for (int k = 1; k <= degree_; ++k) {
    pwx[k] = pwx[k - 1] * u(0);
    pwy[k] = pwy[k - 1] * u(1);
    pwz[k] = pwz[k - 1] * u(2);
  }
  double s = 0.0;
  for (int m = 0; m < coef_.size(); ++m)
    s += coef_(m) * pwx[exps[m][0]] * pwy[exps[m][1]] * pwz[exps[m][2]];
  return s;
}

Eigen::VectorXd Poly::eval(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts) const {
  return monomial::values(frame_, degree_, pts) * coef_;
}

Poly Poly::derivative(int axis) const {
  if (degree_ == 0) return Poly(frame_, 0);
  Poly out(frame_, degree_ - 1);
  const auto& exps = monomial::exponents(degree_);
  for (int m = 0; m < coef_.size(); ++m) {
    std::array<int, 3> e = exps[m];
    if (e[axis] == 0 || coef_(m) == 0.0) continue;
    const int k = e[axis];
    e[axis] -= 1;
    out.coef_(monomial::index(e[0], e[1], e[2])) +=
        coef_(m) * k / frame_.scale;
  }
  return out;
}

Eigen::Vector3d Poly::gradient_at(const Eigen::Vector3d& x) const {
  return {derivative(0).eval(x), derivative(1).eval(x), derivative(2).eval(x)};
}

Poly Poly::promoted(int degree) const {
  if (degree < degree_) throw std::logic_error("Poly::promoted: degree shrink");
  Poly out(frame_, degree);
  out.coef_.head(coef_.size()) = coef_;
  return out;
}

namespace {
void check_frames(const Poly& a, const Poly& b) {
  if (!(a.frame() == b.frame()))
    throw std::logic_error("Poly: mixed-frame arithmetic");
}
}  // namespace

Poly Poly::operator+(const Poly& o) const {
  check_frames(*this, o);
  const int d = std::max(degree_, o.degree_);
  Poly out = promoted(d);
  out.coef_.head(o.coef_.size()) += o.coef_;
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * (-1.0); }

Poly Poly::operator*(const Poly& o) const {
  check_frames(*this, o);
  Poly out(frame_, degree_ + o.degree_);
  const auto& ea = monomial::exponents(degree_);
  const auto& eb = monomial::exponents(out.degree_);  // superset table
  (void)eb;
  const auto& eo = monomial::exponents(o.degree_);
  for (int i = 0; i < coef_.size(); ++i) {
    if (coef_(i) == 0.0) continue;
    for (int j = 0; j < o.coef_.size(); ++j) {
      if (o.coef_(j) == 0.0) continue;
      out.coef_(monomial::index(ea[i][0] + eo[j][0], ea[i][1] + eo[j][1],
                                ea[i][2] + eo[j][2])) += coef_(i) * o.coef_(j);
    }
  }
  return out;
}

Poly Poly::operator*(double s) const {
  Poly out = *this;
  out.coef_ *= s;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  *this = *this + o;
  return *this;
}

VPoly VPoly::constant(const Frame& frame, const Eigen::Vector3d& c) {
  VPoly v(frame, 0);
  for (int i = 0; i < 3; ++i) v[i].coef()(0) = c(i);
  return v;
}

Eigen::Vector3d VPoly::eval(const Eigen::Vector3d& x) const {
  return {comp_[0].eval(x), comp_[1].eval(x), comp_[2].eval(x)};
}

Eigen::MatrixXd VPoly::eval(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts) const {
  Eigen::MatrixXd out(pts.rows(), 3);
  const Eigen::MatrixXd mono =
      monomial::values(frame(), degree(), pts);
  for (int i = 0; i < 3; ++i) out.col(i) = mono * comp_[i].coef();
  return out;
}

VPoly VPoly::curl() const {
  return VPoly(comp_[2].derivative(1) - comp_[1].derivative(2),
               comp_[0].derivative(2) - comp_[2].derivative(0),
               comp_[1].derivative(0) - comp_[0].derivative(1));
}

Poly VPoly::div() const {
  return comp_[0].derivative(0) + comp_[1].derivative(1) +
         comp_[2].derivative(2);
}

VPoly VPoly::cross_from_left(const Eigen::Vector3d& a) const {
  return VPoly(comp_[2] * a(1) - comp_[1] * a(2),
               comp_[0] * a(2) - comp_[2] * a(0),
               comp_[1] * a(0) - comp_[0] * a(1));
}

Poly VPoly::dot(const Eigen::Vector3d& a) const {
  return comp_[0] * a(0) + comp_[1] * a(1) + comp_[2] * a(2);
}

VPoly VPoly::operator+(const VPoly& o) const {
  return VPoly(comp_[0] + o.comp_[0], comp_[1] + o.comp_[1],
               comp_[2] + o.comp_[2]);
}

VPoly VPoly::operator-(const VPoly& o) const {
  return VPoly(comp_[0] - o.comp_[0], comp_[1] - o.comp_[1],
               comp_[2] - o.comp_[2]);
}

VPoly VPoly::operator*(double s) const {
  return VPoly(comp_[0] * s, comp_[1] * s, comp_[2] * s);
}

VPoly operator*(const Poly& s, const VPoly& v) {
  return VPoly(s * v.comp_[0], s * v.comp_[1], s * v.comp_[2]);
}

double VPoly::max_abs_coef() const {
  return std::max({comp_[0].max_abs_coef(), comp_[1].max_abs_coef(),
                   comp_[2].max_abs_coef()});
}

double integrate(const Poly& p, const QuadRule& rule) {
  return rule.weights.dot(p.eval(rule.points));
}

}  // namespace cpj
