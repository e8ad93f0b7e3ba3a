#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace rdsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ActivationKind { tanh, custom_table };

/// Activation used for both g (instantaneous) and h (delayed) terms.
///
/// `custom_table` is a clamped piecewise-linear table through
/// (table_x[i], table_y[i]); its Lipschitz constants are taken as given.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::tanh;
  double lipschitz_g = 1.0;
  double lipschitz_h = 1.0;
  std::vector<double> table_x;
  std::vector<double> table_y;

  double operator()(double v) const;
  bool operator==(const ActivationSpec&) const = default;
};

enum class DelayForm { constant, sinusoidal };

/// tau(t) = a + b sin(t) (b = 0 for the constant form), bounded by `bound`.
struct DelaySpec {
  DelayForm form = DelayForm::constant;
  double a = 0.0;
  double b = 0.0;
  double bound = 1.0;

  double operator()(double t) const;
  bool operator==(const DelaySpec&) const = default;
};

/// The open cube |x_r| < l_r.
struct SpatialDomain {
  int m = 1;
  std::vector<double> half_widths{1.0};

  bool operator==(const SpatialDomain&) const = default;
};

/// Per-node neural field: dw/dt = D lap w - C w + A g(w) + B h(w(t - tau)) + eta.
struct NodeDynamics {
  int n = 0;
  Eigen::VectorXd decay;      // diag(C)
  Eigen::MatrixXd weights;    // A
  Eigen::MatrixXd delayed;    // B
  Eigen::VectorXd bias;       // eta
  Eigen::MatrixXd diffusion;  // D, n x m
  ActivationSpec activation;
  DelaySpec delay;

  bool operator==(const NodeDynamics& other) const;
};

enum class CouplingMode { hybrid, state_only, spatial_only };

/// Outer coupling matrix plus inner gains; node 0 is the pinned node.
struct CouplingTopology {
  int N = 0;
  Eigen::MatrixXd xi;
  Eigen::VectorXd gamma1;  // diag(Gamma^1), state coupling
  Eigen::VectorXd gamma2;  // diag(Gamma^2), spatial coupling
  double sigma = 1.0;
  double strength = 1.0;
  int pinned = 0;
  CouplingMode mode = CouplingMode::hybrid;

  bool uses_state() const { return mode != CouplingMode::spatial_only; }
  bool uses_spatial() const { return mode != CouplingMode::state_only; }
  bool operator==(const CouplingTopology& other) const;
};

/// Element-wise equality that tolerates differing shapes.
bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// True iff every node reaches every other node over the nonzero
/// off-diagonal entries of `xi`.
bool is_irreducible(const Eigen::MatrixXd& xi);

/// Lists every violated standing assumption; empty means valid.
std::vector<std::string> validate_model(const NodeDynamics& dyn,
                                        const SpatialDomain& dom,
                                        const CouplingTopology& top);

std::string to_string(CouplingMode mode);
CouplingMode parse_coupling_mode(const std::string& text);

}  // namespace rdsync
