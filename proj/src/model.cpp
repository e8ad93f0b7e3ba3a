#include "rdsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace rdsync {

double ActivationSpec::operator()(double v) const {
  if (kind == ActivationKind::tanh) return std::tanh(v);
  if (table_x.empty()) return 0.0;
  if (v <= table_x.front()) return table_y.front();
  if (v >= table_x.back()) return table_y.back();
  auto hi = std::upper_bound(table_x.begin(), table_x.end(), v);
  auto i = static_cast<std::size_t>(hi - table_x.begin());
  double w = (v - table_x[i - 1]) / (table_x[i] - table_x[i - 1]);
  return (1.0 - w) * table_y[i - 1] + w * table_y[i];
}

double DelaySpec::operator()(double t) const {
  return form == DelayForm::constant ? a : a + b * std::sin(t);
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool NodeDynamics::operator==(const NodeDynamics& o) const {
  return n == o.n && same_matrix(decay, o.decay) &&
         same_matrix(weights, o.weights) && same_matrix(delayed, o.delayed) &&
         same_matrix(bias, o.bias) && same_matrix(diffusion, o.diffusion) &&
         activation == o.activation && delay == o.delay;
}

bool CouplingTopology::operator==(const CouplingTopology& o) const {
  return N == o.N && same_matrix(xi, o.xi) && same_matrix(gamma1, o.gamma1) &&
         same_matrix(gamma2, o.gamma2) && sigma == o.sigma &&
         strength == o.strength && pinned == o.pinned && mode == o.mode;
}

bool is_irreducible(const Eigen::MatrixXd& xi) {
  const auto n = xi.rows();
  if (n == 0 || xi.cols() != n) return false;
  for (Eigen::Index start = 0; start < n; ++start) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<Eigen::Index> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start)] = true;
    Eigen::Index count = 1;
    while (!frontier.empty()) {
      auto j = frontier.front();
      frontier.pop();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == j || xi(j, k) == 0.0 || seen[static_cast<std::size_t>(k)])
          continue;
        seen[static_cast<std::size_t>(k)] = true;
        ++count;
        frontier.push(k);
      }
    }
    if (count != n) return false;
  }
  return true;
}

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

std::vector<std::string> validate_model(const NodeDynamics& dyn,
                                        const SpatialDomain& dom,
                                        const CouplingTopology& top) {
  std::vector<std::string> out;
  auto report = [&out](const std::string& msg) { out.push_back(msg); };

  // Domain
  if (dom.m < 1) report("domain: m must be at least 1");
  if (static_cast<int>(dom.half_widths.size()) != dom.m)
    report("domain: expected " + std::to_string(dom.m) + " half widths");
  for (double l : dom.half_widths)
    if (!(l > 0.0)) report("domain: half widths must be positive");

  // Node dynamics
  const int n = dyn.n;
  if (n < 1) report("model: n must be at least 1");
  if (dyn.decay.size() != n) report("model: C must have n diagonal entries");
  if (dyn.weights.rows() != n || dyn.weights.cols() != n)
    report("model: A must be n x n");
  if (dyn.delayed.rows() != n || dyn.delayed.cols() != n)
    report("model: B must be n x n");
  if (dyn.bias.size() != n) report("model: eta must have n entries");
  if (dyn.diffusion.rows() != n || dyn.diffusion.cols() != dom.m)
    report("model: D must be n x m");
  if (dyn.decay.size() > 0 && !(dyn.decay.array() > 0.0).all())
    report("model: diag(C) must be positive");
  if (dyn.diffusion.size() > 0 && !(dyn.diffusion.array() >= 0.0).all())
    report("model: D must be nonnegative");
  if (!all_finite(dyn.weights) || !all_finite(dyn.delayed) ||
      !all_finite(dyn.bias) || !all_finite(dyn.decay) ||
      !all_finite(dyn.diffusion))
    report("model: non-finite coefficient");

  const auto& act = dyn.activation;
  if (!(act.lipschitz_g > 0.0) || !(act.lipschitz_h > 0.0))
    report("activation: Lipschitz constants must be positive");
  if (act.kind == ActivationKind::tanh &&
      (act.lipschitz_g != 1.0 || act.lipschitz_h != 1.0))
    report("activation: tanh has Lipschitz constants exactly 1");
  if (act.kind == ActivationKind::custom_table) {
    if (act.table_x.size() < 2 || act.table_x.size() != act.table_y.size())
      report("activation: custom table needs at least two (x, y) points");
    else if (!std::is_sorted(act.table_x.begin(), act.table_x.end()) ||
             std::adjacent_find(act.table_x.begin(), act.table_x.end()) !=
                 act.table_x.end())
      report("activation: custom table x must be strictly increasing");
  }

  const auto& del = dyn.delay;
  if (!(del.bound > 0.0)) report("delay: bound must be positive");
  double lo = del.form == DelayForm::constant ? del.a : del.a - std::abs(del.b);
  double hi = del.form == DelayForm::constant ? del.a : del.a + std::abs(del.b);
  if (lo < 0.0) report("delay: tau(t) must be nonnegative");
  if (hi > del.bound) report("delay: tau(t) exceeds its bound");

  // Coupling
  const int N = top.N;
  if (N < 1) report("coupling: N must be at least 1");
  if (top.xi.rows() != N || top.xi.cols() != N) {
    report("coupling: Xi must be N x N");
  } else if (N >= 1) {
    if (!all_finite(top.xi)) report("coupling: Xi has non-finite entries");
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) {
        if (j != k && top.xi(j, k) < 0.0) {
          std::ostringstream msg;
          msg << "coupling: off-diagonal Xi(" << j + 1 << "," << k + 1
              << ") is negative";
          report(msg.str());
        }
      }
      double row = top.xi.row(j).sum();
      if (std::abs(row) >= 1e-12) {
        std::ostringstream msg;
        msg << "coupling: Xi row sum " << row << " at row " << j + 1
            << " is not zero";
        report(msg.str());
      }
    }
    if (!is_irreducible(top.xi)) report("coupling: Xi is not irreducible");
  }
  if (top.gamma1.size() != n) report("coupling: Gamma1 must have n entries");
  if (top.gamma2.size() != n) report("coupling: Gamma2 must have n entries");
  if (top.gamma1.size() > 0 && !(top.gamma1.array() >= 0.0).all())
    report("coupling: Gamma1 must be nonnegative");
  if (top.gamma2.size() > 0 && !(top.gamma2.array() >= 0.0).all())
    report("coupling: Gamma2 must be nonnegative");
  if (!(top.sigma > 0.0)) report("coupling: sigma must be positive");
  if (!(top.strength >= 0.0)) report("coupling: strength must be nonnegative");
  if (top.pinned != 0) report("coupling: only the first node can be pinned");
  return out;
}

std::string to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::hybrid: return "hybrid";
    case CouplingMode::state_only: return "state_only";
    case CouplingMode::spatial_only: return "spatial_only";
  }
  return "hybrid";
}

CouplingMode parse_coupling_mode(const std::string& text) {
  if (text == "hybrid") return CouplingMode::hybrid;
  if (text == "state_only") return CouplingMode::state_only;
  if (text == "spatial_only") return CouplingMode::spatial_only;
  throw Error("unknown coupling mode: " + text);
}

}  // namespace rdsync
