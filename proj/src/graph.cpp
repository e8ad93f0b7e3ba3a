#include "rdsync/graph.hpp"

#include "rdsync/model.hpp"

#include <Eigen/Eigenvalues>

namespace rdsync {

PerronWeights left_null_vector(const Eigen::MatrixXd& xi) {
  const Eigen::Index n = xi.rows();
  if (n == 0 || xi.cols() != n) throw Error("null vector: Xi must be square");
  if (!xi.allFinite()) throw Error("null vector: Xi has non-finite entries");

  Eigen::VectorXd p = Eigen::VectorXd::Ones(n);
  if (n > 1) {
    // Fix p_N = 1 and solve the first N-1 column equations; the last one
    // is implied by the zero row sums.
    const Eigen::Index k = n - 1;
    Eigen::MatrixXd lhs = xi.topLeftCorner(k, k).transpose();
    Eigen::VectorXd rhs = -xi.row(k).head(k).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible()) throw Error("null vector not found");
    p.head(k) = lu.solve(rhs);
  }
  if (!p.allFinite() || !(p.array() > 0.0).all())
    throw Error("null vector not found");
  p /= p.maxCoeff();

  double residual = (p.transpose() * xi).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) throw Error("null vector not found");
  return PerronWeights{std::move(p)};
}

Eigen::MatrixXd pinned_matrix(const Eigen::MatrixXd& xi, double sigma,
                              double strength) {
  Eigen::MatrixXd out = xi;
  if (out.size() > 0) out(0, 0) -= sigma;
  return strength * out;
}

double sym_part_max_eig(const Eigen::MatrixXd& m, Eigen::Index max_order) {
  if (m.rows() != m.cols()) throw Error("eigensolve: matrix must be square");
  if (m.rows() == 0) throw Error("eigensolve: empty matrix");
  if (m.rows() > max_order) throw Error("eigensolve: matrix exceeds size limit");
  if (!m.allFinite()) throw Error("eigensolve: non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigensolve: no convergence");
  return solver.eigenvalues().maxCoeff();
}

double weighted_pinned_max_eig(const Eigen::MatrixXd& xi, double sigma,
                               double strength) {
  auto weights = left_null_vector(xi);
  return sym_part_max_eig(weights.matrix() * pinned_matrix(xi, sigma, strength));
}

bool lyapunov_stability_check(const Eigen::MatrixXd& xi, double sigma,
                              double strength) {
  return weighted_pinned_max_eig(xi, sigma, strength) < -1e-12;
}

}  // namespace rdsync
