#include "commuteproj/cls.hpp"

namespace cpj {

namespace {

constexpr double kRankThreshold = 1e-11;  // relative to the leading R pivot

struct NormalizedConstraints {
  Eigen::MatrixXd C;        // unit rows, zero rows dropped
  Eigen::VectorXd d;
  std::vector<int> kept;    // original row indices
  std::vector<double> row_norms;
};

NormalizedConstraints normalize_rows(const Eigen::MatrixXd& C,
                                     const Eigen::VectorXd& d,
                                     double feas_tol) {
  NormalizedConstraints out;
  const int m = static_cast<int>(C.rows());
  double maxn = 0.0;
  Eigen::VectorXd norms(m);
  for (int i = 0; i < m; ++i) {
    norms(i) = C.row(i).norm();
    maxn = std::max(maxn, norms(i));
  }
  const double dscale = m ? d.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Eigen::RowVectorXd> rows;
  for (int i = 0; i < m; ++i) {
    if (norms(i) <= 1e-14 * maxn || norms(i) == 0.0) {
      // A vanishing row forces 0 = d_i.
      if (std::abs(d(i)) > feas_tol * std::max(1.0, dscale))
        throw InfeasibleConstraints(
            "constraints infeasible: zero row with nonzero right-hand side",
            std::abs(d(i)));
      continue;
    }
    out.kept.push_back(i);
    out.row_norms.push_back(norms(i));
  }
  out.C.resize(static_cast<int>(out.kept.size()), C.cols());
  out.d.resize(static_cast<int>(out.kept.size()));
  for (size_t r = 0; r < out.kept.size(); ++r) {
    out.C.row(static_cast<int>(r)) = C.row(out.kept[r]) / out.row_norms[r];
    out.d(static_cast<int>(r)) = d(out.kept[r]) / out.row_norms[r];
  }
  return out;
}

int qr_rank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
  const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
  if (diag.size() == 0 || diag(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < diag.size(); ++i)
    if (diag(i) > kRankThreshold * diag(0)) ++r;
  return r;
}

}  // namespace

KktSolution solve_kkt(const KktProblem& problem) {
  const int n = static_cast<int>(problem.mass.rows());
  KktSolution sol;

  NormalizedConstraints nc =
      normalize_rows(problem.constraints, problem.rhs, problem.feas_tol);
  const int m = static_cast<int>(nc.C.rows());

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd Z;  // nullspace basis
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  int rank = 0;
  if (m > 0) {
    qr.compute(nc.C.transpose());  // C^T P = Q R, so C = P R^T Q^T
    rank = qr_rank(qr);
    const Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, std::min(n, n));
    const Eigen::MatrixXd R = qr.matrixQR().topRows(std::min(n, m));
    const Eigen::VectorXd dp = qr.colsPermutation().transpose() * nc.d;
    Eigen::VectorXd y1;
    if (rank > 0)
      y1 = R.topLeftCorner(rank, rank)
               .transpose()
               .triangularView<Eigen::Lower>()
               .solve(dp.head(rank));
    else
      y1.resize(0);
    // Consistency of the dependent rows.
    double res = 0.0;
    if (m > rank) {
      Eigen::VectorXd tail = dp.tail(m - rank);
      if (rank > 0)
        tail -= R.topRightCorner(rank, m - rank).transpose() * y1;
      res = tail.norm();
    }
    const double dscale = std::max(nc.d.norm(), 1e-30);
    sol.constraint_residual = res / std::max(1.0, dscale);
    if (res > problem.feas_tol * std::max(1.0, dscale) + 1e-14 * std::sqrt(m))
      throw InfeasibleConstraints(
          "constraints infeasible: least-squares residual " +
              std::to_string(res),
          res);
    if (rank > 0) x0 = Q.leftCols(rank) * y1;
    Z = Q.rightCols(n - rank);
  } else {
    Z = Eigen::MatrixXd::Identity(n, n);
  }
  sol.rank = rank;
  sol.nullspace_dim = n - rank;

  Eigen::VectorXd x = x0;
  if (n - rank > 0) {
    const Eigen::MatrixXd H = Z.transpose() * problem.mass * Z;
    const Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
      throw std::logic_error("solve_kkt: reduced mass matrix not SPD");
    const Eigen::VectorXd rhs =
        Z.transpose() * (problem.load - problem.mass * x0);
    Eigen::VectorXd u = llt.solve(rhs);
    // One step of iterative refinement keeps the stationarity residual at
    // machine level even for ill-conditioned conforming Gram matrices.
    u += llt.solve(rhs - H * u);
    x += Z * u;
  }
  sol.x = x;
  if (m > 0) {
    const double dscale = std::max(1.0, nc.d.norm());
    sol.constraint_residual =
        std::max(sol.constraint_residual, (nc.C * x - nc.d).norm() / dscale);
  }

  const Eigen::VectorXd g = problem.load - problem.mass * x;
  const double gscale = problem.load.norm() + (problem.mass * x).norm();
  sol.stationarity_residual =
      (n - rank > 0) ? (Z.transpose() * g).norm() / std::max(gscale, 1e-30) : 0.0;
  if (sol.stationarity_residual > 1e-10)
    throw std::logic_error(
        "solve_kkt: Euler-Lagrange residual " +
        std::to_string(sol.stationarity_residual) + " above 1e-10");

  sol.multipliers = Eigen::VectorXd::Zero(problem.constraints.rows());
  if (m > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
        nc.C.transpose());
    cod.setThreshold(kRankThreshold);
    const Eigen::VectorXd mu = cod.solve(g);  // min-norm least squares
    for (size_t r = 0; r < nc.kept.size(); ++r)
      sol.multipliers(nc.kept[r]) = mu(static_cast<int>(r)) / nc.row_norms[r];
  }
  return sol;
}

int nullspace_dimension(const Eigen::MatrixXd& constraints) {
  const int n = static_cast<int>(constraints.cols());
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(constraints.rows());
  NormalizedConstraints nc = normalize_rows(constraints, dummy, 1.0);
  if (nc.C.rows() == 0) return n;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(nc.C.transpose());
  return n - qr_rank(qr);
}

}  // namespace cpj
