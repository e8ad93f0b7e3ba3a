#pragma once

#include "rdsync/graph.hpp"
#include "rdsync/model.hpp"
#include "rdsync/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rdsync {

struct CriterionInputs {
  double eps1 = 1.0;
  double eps2 = 1.0;
  double rho_star = 0.0;
  double tau_bound = 1.0;
};

enum class Verdict { synchronizes, beta1_not_dominant, delta_nonpositive };

std::string to_string(Verdict v);

struct Alphas {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;  // 0 in spatial_only mode
  double alpha4 = 0.0;  // 0 in state_only mode
};

/// Exponential synchronization certificate for the hybrid-coupled network.
struct CriterionReport {
  CouplingMode mode = CouplingMode::hybrid;
  double d = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
  double beta1 = 0.0;
  double beta3 = 0.0;
  double beta = 0.0;
  double rho_star = 0.0;
  std::optional<double> lambda;
  std::optional<double> delta;
  Verdict verdict = Verdict::beta1_not_dominant;
  PerronWeights weights;
};

/// d = min_k sum_r D_kr / l_r^2
double compute_d(const Eigen::MatrixXd& diffusion,
                 const std::vector<double>& half_widths);

Alphas compute_alphas(const NodeDynamics& dyn, const CouplingTopology& top,
                      const SpatialDomain& dom, const CriterionInputs& in);

/// Unique positive root of lambda - beta1 + alpha2 exp(lambda tau) = 0.
/// Throws when beta1 <= alpha2.
double solve_lambda(double beta1, double alpha2, double tau_bound);

CriterionReport theorem1_certificate(const NodeDynamics& dyn,
                                     const CouplingTopology& top,
                                     const SpatialDomain& dom,
                                     const CriterionInputs& in);

struct EpsilonPair {
  double eps1 = 1.0;
  double eps2 = 1.0;
  bool operator==(const EpsilonPair&) const = default;
};

struct TuningResult {
  EpsilonPair choice;
  CriterionReport report;
};

/// Best certificate over an (eps1, eps2) grid by delta; absent delta ranks
/// last, ties go to smaller eps1 then smaller eps2.
TuningResult tune_epsilons(const NodeDynamics& dyn, const CouplingTopology& top,
                           const SpatialDomain& dom, double rho_star,
                           double tau_bound,
                           const std::vector<EpsilonPair>& grid);

struct ComparisonResult {
  bool holds = false;
  double lambda = 0.0;
  double delta = 0.0;
  double rho_star = 0.0;
  double worst_ratio = 0.0;  // max over samples of V(t) e^{delta t}
  std::vector<double> times;
  std::vector<double> values;
};

/// Integrates the worst-case scalar delayed system
///   V' = -beta1 V + alpha2 V(t - tau)  on control windows,
///   V' =  beta3 V + alpha2 V(t - tau)  on rest windows,
/// from V = 1 on [-tau, 0] with RK4, and checks V(t) <= 1.0001 e^{-delta t}.
ComparisonResult comparison_bound_check(double beta1, double alpha2,
                                        double beta3,
                                        const IntermittentSchedule& sched,
                                        double tau_bound, double horizon);

/// Flat "key = value" rendering of a report.
std::string format_report(const CriterionReport& r);

}  // namespace rdsync
