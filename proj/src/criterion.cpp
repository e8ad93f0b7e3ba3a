#include "rdsync/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rdsync {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::synchronizes: return "synchronizes";
    case Verdict::beta1_not_dominant: return "beta1_not_dominant";
    case Verdict::delta_nonpositive: return "delta_nonpositive";
  }
  return "beta1_not_dominant";
}

double compute_d(const Eigen::MatrixXd& diffusion,
                 const std::vector<double>& half_widths) {
  if (diffusion.rows() == 0 ||
      diffusion.cols() != static_cast<Eigen::Index>(half_widths.size()))
    throw Error("compute_d: D must be n x m with m half widths");
  Eigen::ArrayXd inv_l2(diffusion.cols());
  for (Eigen::Index r = 0; r < diffusion.cols(); ++r) {
    double l = half_widths[static_cast<std::size_t>(r)];
    inv_l2(r) = 1.0 / (l * l);
  }
  return (diffusion.array().rowwise() * inv_l2.transpose()).rowwise().sum().minCoeff();
}

Alphas compute_alphas(const NodeDynamics& dyn, const CouplingTopology& top,
                      const SpatialDomain& dom, const CriterionInputs& in) {
  if (!(in.eps1 > 0.0) || !(in.eps2 > 0.0))
    throw Error("criterion: eps1 and eps2 must be positive");
  const auto& A = dyn.weights;
  const auto& B = dyn.delayed;
  const double g = dyn.activation.lipschitz_g;
  const double h = dyn.activation.lipschitz_h;
  const auto n = static_cast<Eigen::Index>(dyn.n);

  Eigen::MatrixXd inner = -Eigen::MatrixXd(dyn.decay.asDiagonal());
  inner += A * A.transpose() / in.eps1;
  inner += in.eps1 * g * g * Eigen::MatrixXd::Identity(n, n);
  inner += B * B.transpose() / in.eps2;

  Alphas out;
  out.alpha1 = 2.0 * sym_part_max_eig(inner);
  out.alpha2 = 2.0 * in.eps2 * h * h;

  const double coupling_eig =
      weighted_pinned_max_eig(top.xi, top.sigma, top.strength);
  double inv_l2_sum = 0.0;
  for (double l : dom.half_widths) inv_l2_sum += 1.0 / (l * l);
  if (top.uses_state()) out.alpha3 = 2.0 * top.gamma1.minCoeff() * coupling_eig;
  if (top.uses_spatial())
    out.alpha4 = 2.0 * top.gamma2.minCoeff() * coupling_eig * inv_l2_sum;
  return out;
}

double solve_lambda(double beta1, double alpha2, double tau_bound) {
  if (!(alpha2 >= 0.0) || !(beta1 > alpha2))
    throw Error("comparison condition violated: need beta1 > alpha2 >= 0");
  if (!(tau_bound > 0.0)) throw Error("solve_lambda: tau must be positive");
  if (alpha2 == 0.0) return beta1;

  auto f = [&](double lam) { return lam - beta1 + alpha2 * std::exp(lam * tau_bound); };
  double lo = 0.0;  // f(lo) < 0
  double hi = beta1;  // f(hi) > 0
  for (int iter = 0; iter < 400; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CriterionReport theorem1_certificate(const NodeDynamics& dyn,
                                     const CouplingTopology& top,
                                     const SpatialDomain& dom,
                                     const CriterionInputs& in) {
  CriterionReport r;
  r.mode = top.mode;
  r.weights = left_null_vector(top.xi);
  r.d = compute_d(dyn.diffusion, dom.half_widths);
  auto alphas = compute_alphas(dyn, top, dom, in);
  r.alpha1 = alphas.alpha1;
  r.alpha2 = alphas.alpha2;
  r.alpha3 = alphas.alpha3;
  r.alpha4 = alphas.alpha4;
  r.beta1 = 2.0 * r.d - r.alpha1 - r.alpha3 - r.alpha4;
  r.beta3 = r.alpha1 - 2.0 * r.d;
  r.beta = r.beta1 + r.beta3;
  r.rho_star = in.rho_star;

  if (!(r.beta1 > r.alpha2)) {
    r.verdict = Verdict::beta1_not_dominant;
    return r;
  }
  r.lambda = solve_lambda(r.beta1, r.alpha2, in.tau_bound);
  r.delta = *r.lambda - r.beta * in.rho_star;
  r.verdict = *r.delta > 0.0 ? Verdict::synchronizes : Verdict::delta_nonpositive;
  return r;
}

namespace {

bool ranks_above(const TuningResult& a, const TuningResult& b) {
  const auto& da = a.report.delta;
  const auto& db = b.report.delta;
  if (da.has_value() != db.has_value()) return da.has_value();
  if (da && *da != *db) return *da > *db;
  if (a.choice.eps1 != b.choice.eps1) return a.choice.eps1 < b.choice.eps1;
  return a.choice.eps2 < b.choice.eps2;
}

}  // namespace

TuningResult tune_epsilons(const NodeDynamics& dyn, const CouplingTopology& top,
                           const SpatialDomain& dom, double rho_star,
                           double tau_bound,
                           const std::vector<EpsilonPair>& grid) {
  if (grid.empty()) throw Error("tune_epsilons: empty grid");
  std::optional<TuningResult> best;
  for (const auto& pair : grid) {
    CriterionInputs in{pair.eps1, pair.eps2, rho_star, tau_bound};
    TuningResult candidate{pair, theorem1_certificate(dyn, top, dom, in)};
    if (!best || ranks_above(candidate, *best)) best = std::move(candidate);
  }
  return *best;
}

namespace {

/// Piecewise-linear record of V on a nonuniform time grid, V = 1 before 0.
class ScalarHistory {
 public:
  double at(double t) const {
    if (t <= 0.0) return 1.0;
    auto hi = std::upper_bound(times_.begin(), times_.end(), t);
    if (hi == times_.end()) return values_.back();
    auto i = static_cast<std::size_t>(hi - times_.begin());
    double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return (1.0 - w) * values_[i - 1] + w * values_[i];
  }
  void push(double t, double v) {
    times_.push_back(t);
    values_.push_back(v);
  }
  std::vector<double>& times() { return times_; }
  std::vector<double>& values() { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace

ComparisonResult comparison_bound_check(double beta1, double alpha2,
                                        double beta3,
                                        const IntermittentSchedule& sched,
                                        double tau_bound, double horizon) {
  if (!(beta1 > alpha2) || !(alpha2 >= 0.0))
    throw Error("comparison check: need beta1 > alpha2 >= 0");
  if (!(beta1 + beta3 >= 0.0))
    throw Error("comparison check: need beta1 + beta3 >= 0");
  if (!(horizon > 0.0) || horizon > sched.horizon())
    throw Error("comparison check: schedule does not cover the horizon");

  ComparisonResult out;
  out.rho_star = rho_star(sched);
  out.lambda = solve_lambda(beta1, alpha2, tau_bound);
  out.delta = out.lambda - (beta1 + beta3) * out.rho_star;
  if (!(out.delta > 0.0))
    throw Error("comparison check: decay rate delta is not positive");

  const double max_step = std::min(1e-3, tau_bound / 4.0);
  ScalarHistory hist;
  hist.push(0.0, 1.0);

  auto integrate = [&](double from, double to, double rate) {
    if (!(to > from)) return;
    auto steps = static_cast<long>(std::ceil((to - from) / max_step));
    double h = (to - from) / static_cast<double>(steps);
    double v = hist.values().back();
    for (long s = 0; s < steps; ++s) {
      double t = from + static_cast<double>(s) * h;
      auto rhs = [&](double time, double value) {
        return rate * value + alpha2 * hist.at(time - tau_bound);
      };
      double k1 = rhs(t, v);
      double k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
      double k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
      double k4 = rhs(t + h, v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      hist.push(s + 1 == steps ? to : from + static_cast<double>(s + 1) * h, v);
    }
  };

  const auto& spans = sched.spans();
  for (std::size_t i = 0; i < spans.size() && spans[i].start < horizon; ++i) {
    double stop = std::min(spans[i].stop, horizon);
    double next = std::min(sched.next_start(i), horizon);
    integrate(spans[i].start, stop, -beta1);
    integrate(stop, next, beta3);
  }

  out.times = std::move(hist.times());
  out.values = std::move(hist.values());
  out.holds = true;
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    double ratio = out.values[k] * std::exp(out.delta * out.times[k]);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (!(ratio <= 1.0001)) out.holds = false;
  }
  return out;
}

std::string format_report(const CriterionReport& r) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "mode = " << to_string(r.mode) << '\n';
  out << "d = " << r.d << '\n';
  out << "alpha1 = " << r.alpha1 << '\n';
  out << "alpha2 = " << r.alpha2 << '\n';
  out << "alpha3 = " << r.alpha3 << '\n';
  out << "alpha4 = " << r.alpha4 << '\n';
  out << "beta1 = " << r.beta1 << '\n';
  out << "beta3 = " << r.beta3 << '\n';
  out << "beta = " << r.beta << '\n';
  out << "rho_star = " << r.rho_star << '\n';
  out << "lambda = ";
  if (r.lambda) out << *r.lambda; else out << "absent";
  out << '\n' << "delta = ";
  if (r.delta) out << *r.delta; else out << "absent";
  out << '\n' << "p =";
  for (Eigen::Index j = 0; j < r.weights.p.size(); ++j) out << ' ' << r.weights.p(j);
  out << '\n' << "verdict = " << to_string(r.verdict) << '\n';
  return out.str();
}

}  // namespace rdsync
