#include "commuteproj/fields.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace cpj {

namespace {

constexpr double kPi = 3.14159265358979323846;

NamedField trig_field(double freq_mult) {
  NamedField f;
  f.id = "trig";
  const double w = kPi * freq_mult;
  f.field.value = [w](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(w * x(1)), std::sin(w * x(2)),
                           std::sin(w * x(0)));
  };
  f.field.curl = [w](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(-w * std::cos(w * x(2)), -w * std::cos(w * x(0)),
                           -w * std::cos(w * x(1)));
  };
  return f;
}

// Vanishing tangential trace on the boundary of the unit cube.
NamedField trigN_field() {
  NamedField f;
  f.id = "trigN";
  auto s = [](double t) { return std::sin(kPi * t); };
  auto c = [](double t) { return std::cos(kPi * t); };
  f.field.value = [s](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(s(x(1)) * s(x(2)), s(x(2)) * s(x(0)),
                           s(x(0)) * s(x(1)));
  };
  f.field.curl = [s, c](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(kPi * s(x(0)) * (c(x(1)) - c(x(2))),
                           kPi * s(x(1)) * (c(x(2)) - c(x(0))),
                           kPi * s(x(2)) * (c(x(0)) - c(x(1))));
  };
  return f;
}

NamedField grad_field() {
  NamedField f;
  f.id = "grad";
  f.field.value = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(x(1) * x(2), x(0) * x(2), x(0) * x(1));
  };
  f.field.curl = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  return f;
}

NamedField gradtrig_field() {
  NamedField f;
  f.id = "gradtrig";
  auto s = [](double t) { return std::sin(kPi * t); };
  auto c = [](double t) { return std::cos(kPi * t); };
  f.field.value = [s, c](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(kPi * c(x(0)) * s(x(1)) * s(x(2)),
                           kPi * s(x(0)) * c(x(1)) * s(x(2)),
                           kPi * s(x(0)) * s(x(1)) * c(x(2)));
  };
  f.field.curl = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  return f;
}

// Asymmetric trigonometric field used by the single-tetrahedron sweep.
NamedField trigxy_field() {
  NamedField f;
  f.id = "trigxy";
  f.field.value = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(0.0, 0.0, std::sin(x(0) * x(1)));
  };
  f.field.curl = [](const Eigen::Vector3d& x) {
    const double c = std::cos(x(0) * x(1));
    return Eigen::Vector3d(x(0) * c, -x(1) * c, 0.0);
  };
  return f;
}

// Phase-shifted anisotropic sine: every Taylor degree is present, so
// degree-sweep errors decay without parity spikes.
NamedField trigmix_field() {
  NamedField f;
  f.id = "trigmix";
  auto arg = [](const Eigen::Vector3d& x) {
    return 0.15 * x(0) + 0.1 * x(1) + x(2) + 0.4;
  };
  f.field.value = [arg](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(0.0, 0.0, std::sin(arg(x)));
  };
  f.field.curl = [arg](const Eigen::Vector3d& x) {
    const double c = std::cos(arg(x));
    return Eigen::Vector3d(0.1 * c, -0.15 * c, 0.0);
  };
  return f;
}

// Vanishing tangential trace on the z = 0 plane (mixed-tag cube runs).
NamedField trigz_field() {
  NamedField f;
  f.id = "trigz";
  f.field.value = [](const Eigen::Vector3d& x) {
    const double s = std::sin(kPi * x(2));
    return Eigen::Vector3d(s, s, 0.0);
  };
  f.field.curl = [](const Eigen::Vector3d& x) {
    const double c = kPi * std::cos(kPi * x(2));
    return Eigen::Vector3d(-c, c, 0.0);
  };
  return f;
}

NamedField zero_field() {
  NamedField f;
  f.id = "zero";
  f.field.value = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  f.field.curl = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  f.field.divergence = [](const Eigen::Vector3d&) { return 0.0; };
  return f;
}

// Seeded random vector polynomial of total degree d, shared by the value and
// curl callbacks through a heap-held symbolic form.
NamedField poly_field(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Frame frame{Eigen::Vector3d(0.5, 0.5, 0.5), 1.0};
  const int dim = monomial::dimension(d);
  VPoly v(frame, d);
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < dim; ++m) v[c].coef()(m) = uni(rng);
  auto vp = std::make_shared<VPoly>(v);
  auto cp = std::make_shared<VPoly>(v.curl());
  auto dp = std::make_shared<Poly>(v.div());
  NamedField f;
  f.id = "poly:" + std::to_string(d);
  f.field.value = [vp](const Eigen::Vector3d& x) { return vp->eval(x); };
  f.field.curl = [cp](const Eigen::Vector3d& x) { return cp->eval(x); };
  f.field.divergence = [dp](const Eigen::Vector3d& x) { return dp->eval(x); };
  return f;
}

}  // namespace

NamedField make_field(const std::string& id, std::uint64_t seed) {
  if (id == "trig") return trig_field(1.0);
  if (id.rfind("trig:", 0) == 0) {
    NamedField f = trig_field(std::stod(id.substr(5)));
    f.id = id;
    return f;
  }
  if (id == "trigN") return trigN_field();
  if (id == "trigxy") return trigxy_field();
  if (id == "trigmix") return trigmix_field();
  if (id == "trigz") return trigz_field();
  if (id == "grad") return grad_field();
  if (id == "gradtrig") return gradtrig_field();
  if (id == "zero") return zero_field();
  if (id.rfind("poly:", 0) == 0) return poly_field(std::stoi(id.substr(5)), seed);
  throw std::invalid_argument("unknown field id '" + id + "'");
}

double curl_consistency_error(const AnalyticVecField& f, std::uint64_t seed,
                              int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d x(uni(rng), uni(rng), uni(rng));
    Eigen::Matrix3d J;  // J(r, c) = d v_r / d x_c
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d dx = Eigen::Vector3d::Zero();
      dx(c) = h;
      J.col(c) = (f.value(x + dx) - f.value(x - dx)) / (2.0 * h);
    }
    const Eigen::Vector3d fd(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0),
                             J(1, 0) - J(0, 1));
    const Eigen::Vector3d cl = f.curl(x);
    worst = std::max(worst, (fd - cl).norm() / std::max(1.0, cl.norm()));
  }
  return worst;
}

}  // namespace cpj
