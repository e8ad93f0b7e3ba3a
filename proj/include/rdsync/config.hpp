#pragma once

#include "rdsync/criterion.hpp"
#include "rdsync/model.hpp"
#include "rdsync/schedule.hpp"
#include "rdsync/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rdsync {

struct GeneratorParams {
  double theta = 0.0;
  double omega = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  bool operator==(const GeneratorParams&) const = default;
};

/// Where the control schedule comes from: listed spans (optionally repeated
/// out to `repeat_to`), a random generator, or a schedule file.
struct ScheduleSection {
  std::vector<ControlSpan> listed;
  std::optional<double> end;
  std::optional<double> repeat_to;
  std::optional<GeneratorParams> generate;
  std::string file;

  IntermittentSchedule build() const;
  bool operator==(const ScheduleSection&) const = default;
};

struct CriterionSection {
  double eps1 = 1.0;
  double eps2 = 1.0;
  std::optional<double> rho_star;   // default: from the schedule
  std::optional<double> tau_bound;  // default: the delay bound
  std::vector<EpsilonPair> grid;    // nonempty: tune instead of eps1/eps2
  bool operator==(const CriterionSection&) const = default;
};

struct SimulationSection {
  int points = 101;
  double dt = 1e-3;
  double horizon = 100.0;
  int sample_every = 100;
  GainMode gain = GainMode::static_gain;
  double psi = 0.1;
  std::vector<Eigen::VectorXd> initial;
  Eigen::VectorXd target;
  bool record_components = false;
  bool operator==(const SimulationSection& o) const;
};

struct OutputSection {
  std::string csv;
  std::string format = "text";  // text | json
  bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
  NodeDynamics dyn;
  SpatialDomain dom;
  CouplingTopology top;
  ScheduleSection schedule;
  CriterionSection criterion;
  SimulationSection simulation;
  OutputSection output;

  IntermittentSchedule build_schedule() const { return schedule.build(); }
  CriterionInputs criterion_inputs() const;
  SimConfig sim_config() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the line-oriented `section.key = value` format.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& cfg);

ExperimentConfig preset_static();
ExperimentConfig preset_static_certified();
ExperimentConfig preset_adaptive();
ExperimentConfig preset_uncoupled();
ExperimentConfig preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

/// Negated least-squares slope of log(error_norm) over [t_start, t_end].
double fit_decay_rate(const ErrorTrajectory& traj, double t_start, double t_end);

void write_trajectory_csv(const ErrorTrajectory& traj, std::ostream& out);

/// Writes the raw fields as little-endian doubles to `path` and a text
/// descriptor to `path + ".txt"`.
void write_field_dump(const Simulator& sim, const SimState& state,
                      const std::string& path);

std::string report_to_json(const CriterionReport& r);

}  // namespace rdsync
