// Dense trivariate polynomials over a per-element monomial frame
// u = (x - center)/scale. All symbolic algebra (products, curl, div) stays
// within one frame; cross-element quantities are compared through point
// evaluation only.
#ifndef COMMUTEPROJ_POLYNOMIAL_HPP
#define COMMUTEPROJ_POLYNOMIAL_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "commuteproj/quadrature.hpp"

namespace cpj {

struct Frame {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double scale = 1.0;

  bool operator==(const Frame& o) const {
    return center == o.center && scale == o.scale;
  }
};

namespace monomial {

/// Number of trivariate monomials of total degree <= d.
int dimension(int d);

/// Exponent triples of all monomials of total degree <= d, graded order.
const std::vector<std::array<int, 3>>& exponents(int d);

/// Index of the monomial u^a v^b w^c in the graded order.
int index(int a, int b, int c);

/// Values of all monomials of degree <= d of the frame at the given points;
/// rows = points, cols = monomials.
Eigen::MatrixXd values(const Frame& frame, int d,
                       const Eigen::Matrix<double, Eigen::Dynamic, 3>& points);

}  // namespace monomial

/// Scalar polynomial, dense coefficients over the graded monomial basis of
/// its frame.
class Poly {
 public:
  Poly() = default;
  Poly(Frame frame, int degree)
      : frame_(frame), degree_(degree),
        coef_(Eigen::VectorXd::Zero(monomial::dimension(degree))) {}
  Poly(Frame frame, int degree, Eigen::VectorXd coef)
      : frame_(frame), degree_(degree), coef_(std::move(coef)) {}

  /// The affine polynomial c0 + g.(x - x0) expressed in the frame.
  static Poly affine(const Frame& frame, double c0, const Eigen::Vector3d& g,
                     const Eigen::Vector3d& x0);

  const Frame& frame() const { return frame_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& coef() const { return coef_; }
  Eigen::VectorXd& coef() { return coef_; }

  double eval(const Eigen::Vector3d& x) const;
  Eigen::VectorXd eval(const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts) const;

  Poly derivative(int axis) const;          // d/dx_axis
  Eigen::Vector3d gradient_at(const Eigen::Vector3d& x) const;

  Poly promoted(int degree) const;          // same polynomial, larger store
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double s) const;
  Poly& operator+=(const Poly& o);

  double max_abs_coef() const { return coef_.size() ? coef_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  Frame frame_;
  int degree_ = 0;
  Eigen::VectorXd coef_;
};

/// Vector-valued polynomial with three components in a common frame.
class VPoly {
 public:
  VPoly() = default;
  VPoly(Frame frame, int degree)
      : comp_{Poly(frame, degree), Poly(frame, degree), Poly(frame, degree)} {}
  VPoly(Poly x, Poly y, Poly z) : comp_{std::move(x), std::move(y), std::move(z)} {}

  static VPoly constant(const Frame& frame, const Eigen::Vector3d& c);

  const Frame& frame() const { return comp_[0].frame(); }
  int degree() const { return comp_[0].degree(); }
  const Poly& operator[](int i) const { return comp_[i]; }
  Poly& operator[](int i) { return comp_[i]; }

  Eigen::Vector3d eval(const Eigen::Vector3d& x) const;
  /// rows = points, cols = components.
  Eigen::MatrixXd eval(const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts) const;

  VPoly curl() const;
  Poly div() const;
  VPoly cross_from_left(const Eigen::Vector3d& a) const;  // a x this
  Poly dot(const Eigen::Vector3d& a) const;               // a . this

  VPoly operator+(const VPoly& o) const;
  VPoly operator-(const VPoly& o) const;
  VPoly operator*(double s) const;
  friend VPoly operator*(const Poly& s, const VPoly& v);

  double max_abs_coef() const;

 private:
  std::array<Poly, 3> comp_;
};

/// Quadrature of a scalar polynomial against a rule.
double integrate(const Poly& p, const QuadRule& rule);

}  // namespace cpj

#endif
