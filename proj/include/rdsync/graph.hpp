#pragma once

#include <Eigen/Dense>

namespace rdsync {

/// Positive left null vector p of the coupling matrix (p^T Xi = 0), scaled
/// so that max p = 1.
struct PerronWeights {
  Eigen::VectorXd p;

  Eigen::MatrixXd matrix() const { return p.asDiagonal(); }
};

PerronWeights left_null_vector(const Eigen::MatrixXd& xi);

/// strength * (Xi - diag(sigma, 0, ..., 0))
Eigen::MatrixXd pinned_matrix(const Eigen::MatrixXd& xi, double sigma,
                              double strength);

inline constexpr Eigen::Index kMaxDenseOrder = 64;

/// Largest eigenvalue of the symmetric part (M + M^T) / 2.
double sym_part_max_eig(const Eigen::MatrixXd& m,
                        Eigen::Index max_order = kMaxDenseOrder);

/// lambda_max({P pinned}^s), with P from Xi's Perron weights.
double weighted_pinned_max_eig(const Eigen::MatrixXd& xi, double sigma,
                               double strength);

/// True iff {P Xi~}^s is negative definite (lambda_max < -1e-12).
bool lyapunov_stability_check(const Eigen::MatrixXd& xi, double sigma,
                              double strength);

}  // namespace rdsync
