// Equality-constrained quadratic minimization solved by the nullspace
// method: rank-revealing QR of the (row-normalized) constraint matrix, then
// an SPD solve in the constraint nullspace. Tolerant of redundant but
// consistent constraint rows.
#ifndef COMMUTEPROJ_CLS_HPP
#define COMMUTEPROJ_CLS_HPP

#include <stdexcept>

#include <Eigen/Dense>

namespace cpj {

/// minimize 1/2 x^T M x - b^T x  subject to  C x = d.
/// For a mass-matrix objective ||t - v||^2 this is M = Gram, b = (t, basis).
struct KktProblem {
  Eigen::MatrixXd mass;
  Eigen::VectorXd load;
  Eigen::MatrixXd constraints;  // may have zero rows (m = 0 allowed)
  Eigen::VectorXd rhs;
  double feas_tol = 1e-9;  // relative consistency tolerance
};

struct KktSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;       // minimum-norm
  double constraint_residual = 0.0;  // relative
  double stationarity_residual = 0.0;
  int rank = 0;
  int nullspace_dim = 0;
};

class InfeasibleConstraints : public std::runtime_error {
 public:
  InfeasibleConstraints(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

KktSolution solve_kkt(const KktProblem& problem);

/// dim(space) - rank of the (row-normalized) constraint matrix.
int nullspace_dimension(const Eigen::MatrixXd& constraints);

}  // namespace cpj

#endif
