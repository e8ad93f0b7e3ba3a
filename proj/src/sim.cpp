#include "rdsync/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rdsync {

std::vector<double> TridiagonalOperator::apply(std::span<const double> v) const {
  const std::size_t m = size();
  if (v.size() != m) throw Error("tridiagonal apply: size mismatch");
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = diag[i] * v[i];
    if (i > 0) acc += lower[i] * v[i - 1];
    if (i + 1 < m) acc += upper[i] * v[i + 1];
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd TridiagonalOperator::dense() const {
  const auto m = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    auto u = static_cast<std::size_t>(i);
    out(i, i) = diag[u];
    if (i > 0) out(i, i - 1) = lower[u];
    if (i + 1 < m) out(i, i + 1) = upper[u];
  }
  return out;
}

TridiagonalOperator build_laplacian(const Grid1D& grid) {
  if (grid.points < 3) throw Error("laplacian: need at least 3 grid points");
  const double inv = 1.0 / (grid.dx() * grid.dx());
  const auto m = static_cast<std::size_t>(grid.points);
  TridiagonalOperator op;
  op.lower.assign(m, inv);
  op.diag.assign(m, -2.0 * inv);
  op.upper.assign(m, inv);
  op.lower[0] = 0.0;
  op.upper[m - 1] = 0.0;
  return op;
}

std::vector<double> solve_tridiagonal(const TridiagonalOperator& op,
                                      std::span<const double> rhs) {
  const std::size_t m = op.size();
  if (rhs.size() != m || m == 0) throw Error("tridiagonal solve: size mismatch");
  std::vector<double> c_star(m);
  std::vector<double> x(m);
  c_star[0] = op.upper[0] / op.diag[0];
  x[0] = rhs[0] / op.diag[0];
  for (std::size_t i = 1; i < m; ++i) {
    double pivot = op.diag[i] - op.lower[i] * c_star[i - 1];
    c_star[i] = op.upper[i] / pivot;
    x[i] = (rhs[i] - op.lower[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = m - 1; i-- > 0;) x[i] -= c_star[i] * x[i + 1];
  return x;
}

BlockTridiagonalSolver::BlockTridiagonalSolver(const Eigen::MatrixXd& diag,
                                               const Eigen::MatrixXd& off,
                                               int blocks)
    : off_(off) {
  if (blocks < 1) throw Error("block solver: need at least one block");
  pivot_inv_.reserve(static_cast<std::size_t>(blocks));
  upper_.reserve(static_cast<std::size_t>(blocks));
  Eigen::MatrixXd pivot = diag;
  for (int i = 0; i < blocks; ++i) {
    if (i > 0) pivot = diag - off * upper_.back();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(pivot);
    pivot_inv_.push_back(lu.inverse());
    upper_.push_back(pivot_inv_.back() * off);
  }
}

void BlockTridiagonalSolver::solve_in_place(Eigen::Ref<Eigen::MatrixXd> rhs) const {
  const auto blocks = static_cast<Eigen::Index>(pivot_inv_.size());
  if (rhs.cols() != blocks) throw Error("block solver: size mismatch");
  Eigen::VectorXd tmp(rhs.rows());
  tmp = pivot_inv_[0] * rhs.col(0);
  rhs.col(0) = tmp;
  for (Eigen::Index i = 1; i < blocks; ++i) {
    tmp = rhs.col(i) - off_ * rhs.col(i - 1);
    rhs.col(i) = pivot_inv_[static_cast<std::size_t>(i)] * tmp;
  }
  for (Eigen::Index i = blocks - 1; i-- > 0;) {
    tmp = upper_[static_cast<std::size_t>(i)] * rhs.col(i + 1);
    rhs.col(i) -= tmp;
  }
}

void DelayHistory::push(double t, Eigen::MatrixXd snapshot) {
  if (!times_.empty() && !(t > times_.back()))
    throw Error("history: times must increase");
  times_.push_back(t);
  snapshots_.push_back(std::move(snapshot));
  // Keep one snapshot at or before t - span for interpolation.
  while (times_.size() > 2 && times_[1] <= t - span_) {
    times_.pop_front();
    snapshots_.pop_front();
  }
}

void DelayHistory::interpolate_into(double query, Eigen::MatrixXd& out) const {
  if (times_.empty()) throw Error("history: empty");
  if (query < times_.front())
    throw Error("history: query before the start of the history");
  if (query > times_.back()) throw Error("history: query in the future");
  auto hi = std::lower_bound(times_.begin(), times_.end(), query);
  auto i = static_cast<std::size_t>(hi - times_.begin());
  if (*hi == query) {
    out = snapshots_[i];
    return;
  }
  double w = (query - times_[i - 1]) / (times_[i] - times_[i - 1]);
  out = (1.0 - w) * snapshots_[i - 1] + w * snapshots_[i];
}

Eigen::MatrixXd DelayHistory::at(double query) const {
  Eigen::MatrixXd out;
  interpolate_into(query, out);
  return out;
}

void SlidingWindowMax::push(double t, double value) {
  while (!window_.empty() && window_.back().second <= value) window_.pop_back();
  window_.emplace_back(t, value);
  while (window_.front().first < t - span_) window_.pop_front();
}

double SlidingWindowMax::max() const {
  if (window_.empty()) throw Error("window: no samples");
  return window_.front().second;
}

std::string to_string(GainMode mode) {
  return mode == GainMode::adaptive ? "adaptive" : "static";
}

Grid1D SimConfig::grid() const {
  if (dom.half_widths.empty()) throw Error("simulation: domain has no width");
  return Grid1D{points, dom.half_widths.front()};
}

bool SimConfig::operator==(const SimConfig& o) const {
  if (initial.size() != o.initial.size()) return false;
  for (std::size_t j = 0; j < initial.size(); ++j)
    if (!same_matrix(initial[j], o.initial[j])) return false;
  return dyn == o.dyn && top == o.top && dom == o.dom && points == o.points &&
         dt == o.dt && horizon == o.horizon && schedule == o.schedule &&
         gain == o.gain && psi_rate == o.psi_rate &&
         same_matrix(target_initial, o.target_initial) &&
         sample_every == o.sample_every &&
         record_components == o.record_components;
}

std::vector<std::string> sim_warnings(const SimConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.dt > cfg.dyn.delay.bound / 10.0)
    out.push_back("dt exceeds a tenth of the delay bound");
  return out;
}

DivergenceError::DivergenceError(double t)
    : Error([t] {
        std::ostringstream msg;
        msg << "divergence detected at t = " << t;
        return msg.str();
      }()),
      time_(t) {}

Eigen::VectorXd SimState::field(int j, int k, int points) const {
  return fields.row(j).segment(static_cast<Eigen::Index>(k) * points, points).transpose();
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.dom.m != 1) throw Error("simulation: only one spatial dimension");
  grid_ = cfg_.grid();
  if (grid_.points < 3) throw Error("simulation: need at least 3 grid points");
  if (!(cfg_.dt > 0.0)) throw Error("simulation: dt must be positive");
  N_ = cfg_.top.N;
  n_ = cfg_.dyn.n;
  M_ = grid_.points;
  if (static_cast<int>(cfg_.initial.size()) != N_)
    throw Error("simulation: need one initial vector per node");
  for (const auto& v : cfg_.initial)
    if (v.size() != n_) throw Error("simulation: initial vectors must have n entries");
  if (cfg_.target_initial.size() != n_)
    throw Error("simulation: target initial vector must have n entries");
  if (cfg_.dyn.diffusion.rows() != n_ || cfg_.dyn.diffusion.cols() != 1)
    throw Error("simulation: D must be n x 1");
  cache_.resize(static_cast<std::size_t>(n_));
}

SimState Simulator::initial_state() const {
  SimState s;
  s.fields.resize(N_ + 1, static_cast<Eigen::Index>(n_) * M_);
  for (int j = 0; j <= N_; ++j) {
    Eigen::VectorXd v = cfg_.target_initial;
    if (j < N_) v = cfg_.initial[static_cast<std::size_t>(j)] - cfg_.target_initial;
    for (int k = 0; k < n_; ++k)
      s.fields.row(j).segment(static_cast<Eigen::Index>(k) * M_, M_).setConstant(v(k));
  }
  const double tau = cfg_.dyn.delay.bound;
  s.history = DelayHistory(tau);
  s.history.push(-tau, s.fields);
  s.history.push(0.0, s.fields);
  s.psi = cfg_.gain == GainMode::adaptive ? 0.0 : cfg_.top.strength;
  s.psi_window = SlidingWindowMax(tau);
  double e0 = error_norm(s);
  s.psi_window.push(-tau, e0 * e0);
  s.psi_window.push(0.0, e0 * e0);
  return s;
}

Simulator::Strengths Simulator::strengths_at(const SimState& state) const {
  const bool control = cfg_.schedule.in_control(state.t);
  if (cfg_.gain == GainMode::adaptive) {
    if (control) return {state.psi, state.psi};
    return {1.0, 0.0};
  }
  return {cfg_.top.strength, control ? cfg_.top.strength : 0.0};
}

void Simulator::linear_blocks(int k, Strengths s, Eigen::MatrixXd& diffusive,
                              Eigen::MatrixXd& reactive) const {
  const auto& top = cfg_.top;
  const auto& dyn = cfg_.dyn;
  const int b = N_ + 1;
  diffusive = Eigen::MatrixXd::Zero(b, b);
  reactive = Eigen::MatrixXd::Zero(b, b);
  const double diff = dyn.diffusion(k, 0);
  const double decay = dyn.decay(k);
  for (int j = 0; j < b; ++j) {
    diffusive(j, j) += diff;
    reactive(j, j) -= decay;
  }
  const double g1 = top.gamma1(k);
  const double g2 = top.gamma2(k);
  if (top.uses_state()) reactive.topLeftCorner(N_, N_) += s.coupling * g1 * top.xi;
  if (top.uses_spatial()) diffusive.topLeftCorner(N_, N_) -= s.coupling * g2 * top.xi;
  // Node rows hold errors, so pinning acts on the pinned row alone.
  if (s.pinning != 0.0) {
    const int p = top.pinned;
    if (top.uses_state()) reactive(p, p) -= s.pinning * top.sigma * g1;
    if (top.uses_spatial()) diffusive(p, p) += s.pinning * top.sigma * g2;
  }
}

const BlockTridiagonalSolver& Simulator::solver_for(int k, Strengths s) {
  auto& entry = cache_[static_cast<std::size_t>(k)];
  if (entry.key && *entry.key == s) return entry.solver;
  linear_blocks(k, s, entry.diffusive, entry.reactive);
  const double dt = cfg_.dt;
  const double inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
  const int b = N_ + 1;
  Eigen::MatrixXd diag = Eigen::MatrixXd::Identity(b, b) +
                         dt * inv_dx2 * entry.diffusive - 0.5 * dt * entry.reactive;
  Eigen::MatrixXd off = -0.5 * dt * inv_dx2 * entry.diffusive;
  entry.solver = BlockTridiagonalSolver(diag, off, M_);
  entry.key = s;
  return entry.solver;
}

namespace {

void apply_activation(const ActivationSpec& act, const Eigen::MatrixXd& in,
                      Eigen::MatrixXd& out) {
  if (act.kind == ActivationKind::tanh) {
    out = in.array().tanh().matrix();
  } else {
    out = in.unaryExpr([&act](double v) { return act(v); });
  }
}

}  // namespace

void Simulator::step(SimState& state) {
  const double dt = cfg_.dt;
  const double t = state.t;
  const auto& dyn = cfg_.dyn;
  const Strengths s = strengths_at(state);

  // Delayed states and explicit reaction terms at time t.
  const double lag = std::clamp(dyn.delay(t), 0.0, dyn.delay.bound);
  state.history.interpolate_into(t - lag, delayed_);
  // Node rows become g(pi + e) - g(pi), which is exactly zero when e is.
  auto activate = [&](Eigen::MatrixXd& m) {
    m.topRows(N_).rowwise() += m.row(N_);
    apply_activation(dyn.activation, m, m);
    m.topRows(N_).rowwise() -= m.row(N_);
  };
  Eigen::MatrixXd activated = state.fields;
  activate(activated);
  activate(delayed_);

  const Eigen::Index M = M_;
  const Eigen::Index b = N_ + 1;
  forcing_.resize(b, static_cast<Eigen::Index>(n_) * M);
  for (int k = 0; k < n_; ++k) {
    auto fk = forcing_.middleCols(k * M, M);
    fk.setZero();
    fk.row(N_).setConstant(dyn.bias(k));
    for (int l = 0; l < n_; ++l) {
      if (dyn.weights(k, l) != 0.0) fk += dyn.weights(k, l) * activated.middleCols(l * M, M);
      if (dyn.delayed(k, l) != 0.0) fk += dyn.delayed(k, l) * delayed_.middleCols(l * M, M);
    }
  }

  const double inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
  Eigen::MatrixXd lap(b, M);
  for (int k = 0; k < n_; ++k) {
    const auto& solver = solver_for(k, s);
    const auto& entry = cache_[static_cast<std::size_t>(k)];
    auto u = state.fields.middleCols(k * M, M);
    lap = -2.0 * u;
    lap.rightCols(M - 1) += u.leftCols(M - 1);
    lap.leftCols(M - 1) += u.rightCols(M - 1);
    lap *= inv_dx2;
    rhs_ = u + 0.5 * dt * (entry.diffusive * lap + entry.reactive * u) +
           dt * forcing_.middleCols(k * M, M);
    solver.solve_in_place(rhs_);
    u = rhs_;
  }

  if (cfg_.gain == GainMode::adaptive && cfg_.schedule.in_control(t))
    state.psi += dt * cfg_.psi_rate * state.psi_window.max();

  ++state.step_index;
  state.t = static_cast<double>(state.step_index) * dt;
  if (!state.fields.allFinite() || state.fields.cwiseAbs().maxCoeff() > 1e100)
    throw DivergenceError(state.t);
  state.history.push(state.t, state.fields);
  if (cfg_.gain == GainMode::adaptive) {
    double e = error_norm(state);
    state.psi_window.push(state.t, e * e);
  }
}

double Simulator::error_norm(const SimState& state) const {
  return std::sqrt(state.fields.topRows(N_).squaredNorm() * grid_.dx());
}

std::vector<double> Simulator::component_errors(const SimState& state) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(N_ * n_));
  const auto& f = state.fields;
  for (int j = 0; j < N_; ++j)
    for (int k = 0; k < n_; ++k) {
      double sq = f.row(j).segment(k * M_, M_).squaredNorm();
      out.push_back(std::sqrt(sq * grid_.dx()));
    }
  return out;
}

Eigen::MatrixXd Simulator::physical_fields(const SimState& state) const {
  Eigen::MatrixXd out = state.fields;
  out.topRows(N_).rowwise() += out.row(N_);
  return out;
}

std::vector<double> Simulator::full_field(const SimState& state, int j, int k) const {
  std::vector<double> out(static_cast<std::size_t>(M_) + 2, 0.0);
  for (int i = 0; i < M_; ++i) {
    const Eigen::Index c = static_cast<Eigen::Index>(k) * M_ + i;
    double v = state.fields(j, c);
    if (j < N_) v += state.fields(N_, c);
    out[static_cast<std::size_t>(i) + 1] = v;
  }
  return out;
}

ErrorTrajectory simulate(const SimConfig& cfg) {
  auto violations = validate_model(cfg.dyn, cfg.dom, cfg.top);
  if (!violations.empty()) {
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(msg);
  }
  if (!(cfg.horizon > 0.0)) throw Error("simulation: horizon must be positive");
  if (cfg.sample_every < 1) throw Error("simulation: sample_every must be positive");
  if (cfg.schedule.empty() || cfg.schedule.horizon() < cfg.horizon)
    throw Error("simulation: schedule shorter than horizon");
  if (cfg.gain == GainMode::adaptive) {
    if (!(cfg.psi_rate > 0.0)) throw Error("simulation: psi must be positive");
    if (!small_delay_ok(cfg.schedule, cfg.dyn.delay.bound))
      throw Error("simulation: adaptive gain requires delay bound below the smallest control width");
  }

  Simulator sim(cfg);
  SimState state = sim.initial_state();
  ErrorTrajectory traj;
  auto sample = [&] {
    traj.times.push_back(state.t);
    traj.error_norms.push_back(sim.error_norm(state));
    traj.psi_values.push_back(state.psi);
    if (cfg.record_components) traj.component_errors.push_back(sim.component_errors(state));
  };

  const long steps = std::lround(cfg.horizon / cfg.dt);
  sample();
  for (long s = 1; s <= steps; ++s) {
    sim.step(state);
    if (s % cfg.sample_every == 0 || s == steps) sample();
  }
  return traj;
}

double discrete_l2(std::span<const double> v, double dx) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum * dx);
}

double poincare_residual(std::span<const double> q, double half_width) {
  const std::size_t m = q.size();
  if (m == 0) return 0.0;
  const double dx = 2.0 * half_width / static_cast<double>(m + 1);
  double grad = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    double cur = i < m ? q[i] : 0.0;
    double slope = (cur - prev) / dx;
    grad += slope * slope * dx;
    prev = cur;
  }
  double mass = 0.0;
  for (double v : q) mass += v * v * dx;
  return half_width * half_width * grad - mass;
}

}  // namespace rdsync
