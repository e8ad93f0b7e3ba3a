#include "rdsync/schedule.hpp"

#include "rdsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace rdsync {

IntermittentSchedule::IntermittentSchedule(std::vector<ControlSpan> spans,
                                           double end)
    : spans_(std::move(spans)), end_(end) {
  if (spans_.empty()) {
    if (end_ != 0.0) throw Error("schedule: an empty schedule has end 0");
    return;
  }
  if (spans_.front().start != 0.0)
    throw Error("schedule: the first control span must start at t = 0");
  for (std::size_t i = 0; i < spans_.size(); ++i) {
    const auto& span = spans_[i];
    if (!std::isfinite(span.start) || !std::isfinite(span.stop))
      throw Error("schedule: non-finite span bound");
    if (!(span.start < span.stop))
      throw Error("schedule: span " + std::to_string(i) +
                  " must satisfy t_i < s_i");
    if (span.stop > next_start(i))
      throw Error("schedule: span " + std::to_string(i) +
                  " overlaps the next span");
  }
}

double IntermittentSchedule::next_start(std::size_t i) const {
  return i + 1 < spans_.size() ? spans_[i + 1].start : end_;
}

bool IntermittentSchedule::in_control(double t) const {
  if (!(t >= 0.0 && t <= end_))
    throw Error("schedule: time outside [0, horizon]");
  // Last span whose start is <= t.
  auto it = std::upper_bound(
      spans_.begin(), spans_.end(), t,
      [](double v, const ControlSpan& s) { return v < s.start; });
  if (it == spans_.begin()) return false;
  --it;
  return t <= it->stop;
}

double IntermittentSchedule::rest_proportion(double t) const {
  if (in_control(t)) return 0.0;
  auto it = std::upper_bound(
      spans_.begin(), spans_.end(), t,
      [](double v, const ControlSpan& s) { return v < s.start; });
  --it;
  return (t - it->stop) / (t - it->start);
}

ThetaOmega theta_omega(const IntermittentSchedule& s) {
  if (s.empty()) throw Error("schedule: no spans");
  ThetaOmega out;
  out.theta = std::numeric_limits<double>::infinity();
  out.omega = 0.0;
  const auto& spans = s.spans();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out.theta = std::min(out.theta, spans[i].stop - spans[i].start);
    out.omega = std::max(out.omega, s.next_start(i) - spans[i].start);
  }
  out.usable = out.theta < out.omega;
  return out;
}

double rho_star(const IntermittentSchedule& s) {
  auto to = theta_omega(s);
  return 1.0 - to.theta / to.omega;
}

bool small_delay_ok(const IntermittentSchedule& s, double tau_bound) {
  return tau_bound < theta_omega(s).theta;
}

IntermittentSchedule generate_random(double theta, double omega,
                                     double horizon, std::uint64_t seed) {
  if (!(theta > 0.0) || !(theta < omega))
    throw Error("schedule: generator needs 0 < theta < omega");
  if (!(horizon > 0.0)) throw Error("schedule: horizon must be positive");

  std::mt19937_64 rng(seed);
  const double width_hi = std::max(theta, 0.98 * omega);
  std::vector<ControlSpan> spans;
  double t = 0.0;
  while (t < horizon) {
    double width = std::uniform_real_distribution<double>(theta, width_hi)(rng);
    double gap = std::min(0.01 * omega, omega - width);
    double span = std::uniform_real_distribution<double>(width + gap, omega)(rng);
    // Keep the rounded width and span inside [theta, omega].
    double stop = t + width;
    while (stop - t < theta) stop = std::nextafter(stop, horizon + omega);
    double next = t + span;
    while (next - t > omega && next > stop) next = std::nextafter(next, t);
    spans.push_back({t, stop});
    t = next;
  }
  return IntermittentSchedule(std::move(spans), t);
}

IntermittentSchedule repeat_to_cover(const std::vector<ControlSpan>& listed,
                                     double horizon) {
  if (listed.size() < 2)
    throw Error("schedule: need at least two listed spans to repeat");
  const double shift = listed.back().start - listed.front().start;
  std::vector<ControlSpan> spans(listed.begin(), listed.end());
  double offset = shift;
  std::size_t k = 1;
  while (true) {
    ControlSpan next{listed[k].start + offset, listed[k].stop + offset};
    if (next.start >= horizon)
      return IntermittentSchedule(std::move(spans), next.start);
    spans.push_back(next);
    if (++k == listed.size()) {
      k = 1;
      offset += shift;
    }
  }
}

std::string format_schedule(const IntermittentSchedule& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& span : s.spans()) out << span.start << ' ' << span.stop << '\n';
  out << s.horizon() << '\n';
  return out.str();
}

IntermittentSchedule parse_schedule(std::istream& in) {
  std::vector<ControlSpan> spans;
  std::string line;
  bool have_end = false;
  double end = 0.0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof())
      throw Error("schedule: bad number on line " + std::to_string(lineno));
    if (values.empty()) continue;
    if (have_end)
      throw Error("schedule: content after end marker on line " +
                  std::to_string(lineno));
    if (values.size() == 2) {
      spans.push_back({values[0], values[1]});
    } else if (values.size() == 1) {
      end = values[0];
      have_end = true;
    } else {
      throw Error("schedule: expected 't s' on line " + std::to_string(lineno));
    }
  }
  if (!have_end && !spans.empty()) end = spans.back().stop;
  return IntermittentSchedule(std::move(spans), end);
}

}  // namespace rdsync
