#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace rdsync {

/// Closed control window [start, stop]; the rest window runs from stop to
/// the next span's start.
struct ControlSpan {
  double start = 0.0;
  double stop = 0.0;
  bool operator==(const ControlSpan&) const = default;
};

/// Finite, explicit aperiodically intermittent control schedule.
///
/// `end` is the start of the first span not listed, so the last listed span
/// has rest window (stop, end). Queries are valid on [0, end].
class IntermittentSchedule {
 public:
  IntermittentSchedule() = default;
  IntermittentSchedule(std::vector<ControlSpan> spans, double end);

  const std::vector<ControlSpan>& spans() const { return spans_; }
  double horizon() const { return end_; }
  bool empty() const { return spans_.empty(); }

  /// Start time of the span following span i.
  double next_start(std::size_t i) const;

  bool in_control(double t) const;

  /// Pointwise rest proportion (t - s_i) / (t - t_i) inside rest windows,
  /// 0 inside control windows. Inspection only.
  double rest_proportion(double t) const;

  bool operator==(const IntermittentSchedule&) const = default;

 private:
  std::vector<ControlSpan> spans_;
  double end_ = 0.0;
};

struct ThetaOmega {
  double theta = 0.0;  // smallest control width
  double omega = 0.0;  // largest span width
  bool usable = false;  // theta < omega
};

ThetaOmega theta_omega(const IntermittentSchedule& s);

/// Largest rest proportion, 1 - theta / omega.
double rho_star(const IntermittentSchedule& s);

/// Small-delay condition: tau_bound < theta, strictly.
bool small_delay_ok(const IntermittentSchedule& s, double tau_bound);

/// Random schedule with control widths in [theta, 0.98 omega] and span
/// widths at most omega, covering [0, horizon]. Deterministic in `seed`.
IntermittentSchedule generate_random(double theta, double omega,
                                     double horizon, std::uint64_t seed);

/// Repeats the listed spans after the first one, shifted so the sequence
/// restarts at the last listed span's start, until `horizon` is covered.
/// The last listed span's own rest window is taken from the repetition.
IntermittentSchedule repeat_to_cover(const std::vector<ControlSpan>& listed,
                                     double horizon);

/// "t s" per line; an optional trailing single-number line gives the end.
/// '#' starts a comment.
std::string format_schedule(const IntermittentSchedule& s);
IntermittentSchedule parse_schedule(std::istream& in);

}  // namespace rdsync
