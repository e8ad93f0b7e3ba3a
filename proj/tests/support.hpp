#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace rdsync::testing {

/// Random valid coupling matrix: nonnegative off-diagonals with a random
/// sparsity pattern, a directed ring to force irreducibility, zero row sums.
inline Eigen::MatrixXd random_coupling(int n, std::mt19937_64& rng,
                                       bool symmetric = false) {
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  std::bernoulli_distribution keep(0.4);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k && keep(rng)) xi(j, k) = weight(rng);
  for (int j = 0; j < n; ++j) xi(j, (j + 1) % n) = weight(rng);
  if (symmetric) xi = (0.5 * (xi + xi.transpose())).eval();
  for (int j = 0; j < n; ++j) {
    xi(j, j) = 0.0;
    xi(j, j) = -xi.row(j).sum();
  }
  return xi;
}

/// Random off-diagonal pattern without the forcing ring; may be reducible.
inline Eigen::MatrixXd random_pattern(int n, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(0.3);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k && keep(rng)) xi(j, k) = 1.0;
  for (int j = 0; j < n; ++j) xi(j, j) = -xi.row(j).sum();
  return xi;
}

/// Strong connectivity by Warshall transitive closure.
inline bool closure_irreducible(const Eigen::MatrixXd& xi) {
  const auto n = xi.rows();
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n)));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      reach[j][k] = (j == k) || xi(j, k) != 0.0;
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (reach[j][m] && reach[m][k]) reach[j][k] = true;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (!reach[j][k]) return false;
  return true;
}

/// Characteristic polynomial coefficients (monic, highest degree first) by
/// Faddeev-LeVerrier, in extended precision.
inline std::vector<long double> char_poly(const Eigen::MatrixXd& a) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = a.rows();
  MatL A = a.cast<long double>();
  MatL M = MatL::Zero(n, n);
  std::vector<long double> c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0L;
  for (Eigen::Index k = 1; k <= n; ++k) {
    M = A * M + c[static_cast<std::size_t>(k - 1)] * MatL::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(A * M).trace() / static_cast<long double>(k);
  }
  return c;
}

/// Largest eigenvalue of the symmetric part, via Newton from above on the
/// characteristic polynomial (monotone for real-rooted polynomials).
inline double char_poly_max_eig(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  auto c = char_poly(s);
  long double upper = 0.0L;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    long double r = s(i, i);
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (j != i) r += std::fabs(static_cast<long double>(s(i, j)));
    upper = i == 0 ? r : std::max(upper, r);
  }
  long double x = upper + 1.0L;
  for (int iter = 0; iter < 500; ++iter) {
    long double p = 0.0L, dp = 0.0L;
    for (long double coef : c) {
      dp = dp * x + p;
      p = p * x + coef;
    }
    if (dp == 0.0L) break;
    long double next = x - p / dp;
    if (std::fabs(next - x) <= 1e-18L * (1.0L + std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return static_cast<double>(x);
}

/// Root of lambda - beta1 + alpha2 exp(lambda tau) = 0 by Newton in long double.
inline double lambda_newton(double beta1, double alpha2, double tau) {
  long double x = 0.0L;
  for (int iter = 0; iter < 200; ++iter) {
    long double e = std::exp(static_cast<long double>(tau) * x);
    long double f = x - beta1 + alpha2 * e;
    long double df = 1.0L + alpha2 * tau * e;
    long double next = x - f / df;
    if (std::fabs(next - x) < 1e-18L) return static_cast<double>(next);
    x = next;
  }
  return static_cast<double>(x);
}

}  // namespace rdsync::testing
