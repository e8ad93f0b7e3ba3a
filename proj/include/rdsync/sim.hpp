#pragma once

#include "rdsync/model.hpp"
#include "rdsync/schedule.hpp"

#include <Eigen/Dense>

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rdsync {

/// Uniform interior grid on (-l, l); the Dirichlet boundary points are not
/// stored and are identically zero.
struct Grid1D {
  int points = 101;
  double half_width = 1.0;

  double dx() const { return 2.0 * half_width / (points + 1); }
  double x(int i) const { return -half_width + (i + 1) * dx(); }
  bool operator==(const Grid1D&) const = default;
};

/// Three-diagonal operator stored by bands; lower[0] and upper[M-1] unused.
struct TridiagonalOperator {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> v) const;
  Eigen::MatrixXd dense() const;
};

/// Second difference with zero ghost values.
TridiagonalOperator build_laplacian(const Grid1D& grid);

/// Thomas algorithm. The system must not need pivoting.
std::vector<double> solve_tridiagonal(const TridiagonalOperator& op,
                                      std::span<const double> rhs);

/// Solver for block tridiagonal systems whose diagonal blocks all equal
/// `diag` and whose off-diagonal blocks all equal `off` (block Thomas).
class BlockTridiagonalSolver {
 public:
  BlockTridiagonalSolver() = default;
  BlockTridiagonalSolver(const Eigen::MatrixXd& diag, const Eigen::MatrixXd& off,
                         int blocks);

  /// `rhs` holds one block per column; overwritten with the solution.
  void solve_in_place(Eigen::Ref<Eigen::MatrixXd> rhs) const;

 private:
  Eigen::MatrixXd off_;
  std::vector<Eigen::MatrixXd> pivot_inv_;
  std::vector<Eigen::MatrixXd> upper_;
};

/// Time-stamped snapshots with linear interpolation between them. Keeps
/// enough past to answer queries back to `span` before the newest time.
class DelayHistory {
 public:
  explicit DelayHistory(double span = 0.0) : span_(span) {}

  void push(double t, Eigen::MatrixXd snapshot);
  void interpolate_into(double query, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd at(double query) const;

  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }

 private:
  double span_;
  std::deque<double> times_;
  std::deque<Eigen::MatrixXd> snapshots_;
};

/// Maximum of samples over the trailing window [t - span, t].
class SlidingWindowMax {
 public:
  explicit SlidingWindowMax(double span = 0.0) : span_(span) {}
  void push(double t, double value);
  double max() const;
  bool empty() const { return window_.empty(); }

 private:
  double span_;
  std::deque<std::pair<double, double>> window_;
};

enum class GainMode { static_gain, adaptive };

std::string to_string(GainMode mode);

struct SimConfig {
  NodeDynamics dyn;
  CouplingTopology top;
  SpatialDomain dom;
  int points = 101;
  double dt = 1e-3;
  double horizon = 100.0;
  IntermittentSchedule schedule;
  GainMode gain = GainMode::static_gain;
  double psi_rate = 0.1;
  std::vector<Eigen::VectorXd> initial;  // one constant n-vector per node
  Eigen::VectorXd target_initial;
  int sample_every = 100;
  bool record_components = false;

  Grid1D grid() const;
  bool operator==(const SimConfig& other) const;
};

/// Advisory problems that do not prevent a run (e.g. dt > tau / 10).
std::vector<std::string> sim_warnings(const SimConfig& cfg);

struct ErrorTrajectory {
  std::vector<double> times;
  std::vector<double> error_norms;
  std::vector<double> psi_values;
  // Per sample, ||e^j_k|| flattened node-major (j * n + k).
  std::vector<std::vector<double>> component_errors;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(double t);
  double time() const { return time_; }

 private:
  double time_;
};

/// Errors and target as one (N + 1) x (n M) matrix: row j < N is node j's
/// error w_j - pi, row N is the target pi; column k M + i is neuron k at
/// grid point i.
struct SimState {
  double t = 0.0;
  long step_index = 0;
  Eigen::MatrixXd fields;
  DelayHistory history;
  double psi = 0.0;
  SlidingWindowMax psi_window;

  /// Raw row j (an error for j < N, the target for j == N), neuron k.
  Eigen::VectorXd field(int j, int k, int points) const;
};

/// Time stepper for the pinned, intermittently controlled network.
///
/// Linear terms (own diffusion, decay, state and spatial coupling, pinning)
/// are Crank-Nicolson; activations and the delayed term are explicit.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const Grid1D& grid() const { return grid_; }

  /// State seeded with constant history on [-tau, 0].
  SimState initial_state() const;

  void step(SimState& state);

  double error_norm(const SimState& state) const;
  std::vector<double> component_errors(const SimState& state) const;

  /// Node fields w_j (rows 0..N-1) and the target (row N).
  Eigen::MatrixXd physical_fields(const SimState& state) const;

  /// Full field of node j (target when j == N) with the two boundary zeros.
  std::vector<double> full_field(const SimState& state, int j, int k) const;

 private:
  struct Strengths {
    double coupling = 0.0;
    double pinning = 0.0;
    bool operator==(const Strengths&) const = default;
  };
  Strengths strengths_at(const SimState& state) const;
  const BlockTridiagonalSolver& solver_for(int k, Strengths s);
  void linear_blocks(int k, Strengths s, Eigen::MatrixXd& diffusive,
                     Eigen::MatrixXd& reactive) const;

  SimConfig cfg_;
  Grid1D grid_;
  int N_;
  int n_;
  int M_;
  struct CachedSolver {
    std::optional<Strengths> key;
    BlockTridiagonalSolver solver;
    Eigen::MatrixXd diffusive;
    Eigen::MatrixXd reactive;
  };
  std::vector<CachedSolver> cache_;
  Eigen::MatrixXd delayed_;
  Eigen::MatrixXd forcing_;
  Eigen::MatrixXd rhs_;
};

/// Runs the configured experiment to its horizon. Validates the model, the
/// schedule coverage and (adaptive mode) the small-delay condition.
ErrorTrajectory simulate(const SimConfig& cfg);

/// L2 norm over the grid: sqrt(sum v^2 dx).
double discrete_l2(std::span<const double> v, double dx);

/// l^2 int (q')^2 - int q^2 for a profile vanishing at +-l; differences are
/// taken between neighbouring points including the zero boundary values.
double poincare_residual(std::span<const double> q, double half_width);

}  // namespace rdsync
