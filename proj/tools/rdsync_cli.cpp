// Command-line front end: certify, simulate, schedule-gen, preset,
// verify-lemma3.

#include "rdsync/config.hpp"
#include "rdsync/criterion.hpp"
#include "rdsync/sim.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace rdsync;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Reference {
  const char* name;
  double value;
};

// Published certificate for the four-node ring at c = 250.
constexpr Reference kReference[] = {
    {"d", 0.0063},      {"alpha1", 46.5607}, {"alpha2", 1.0},
    {"alpha3", -150.175}, {"alpha4", -9.375}, {"beta1", 113.0019},
    {"beta3", 46.5481}, {"beta", 159.55},    {"lambda", 3.6115},
    {"delta", 0.4205}};

double report_value(const CriterionReport& r, const std::string& key) {
  if (key == "d") return r.d;
  if (key == "alpha1") return r.alpha1;
  if (key == "alpha2") return r.alpha2;
  if (key == "alpha3") return r.alpha3;
  if (key == "alpha4") return r.alpha4;
  if (key == "beta1") return r.beta1;
  if (key == "beta3") return r.beta3;
  if (key == "beta") return r.beta;
  if (key == "lambda") return r.lambda.value_or(std::nan(""));
  if (key == "delta") return r.delta.value_or(std::nan(""));
  return std::nan("");
}

std::vector<EpsilonPair> parse_grid(const std::string& text) {
  std::vector<EpsilonPair> out;
  std::stringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::istringstream fields(row);
    EpsilonPair pair;
    if (!(fields >> pair.eps1 >> pair.eps2)) throw Error("bad --tune row: '" + row + "'");
    out.push_back(pair);
  }
  return out;
}

int run_certify(const std::string& path, bool compare, std::string format,
                const std::string& tune) {
  auto cfg = load_config(path);
  if (format.empty()) format = cfg.output.format;
  if (!tune.empty()) cfg.criterion.grid = parse_grid(tune);

  CriterionReport report;
  auto in = cfg.criterion_inputs();
  std::optional<EpsilonPair> chosen;
  if (!cfg.criterion.grid.empty()) {
    auto best = tune_epsilons(cfg.dyn, cfg.top, cfg.dom, in.rho_star, in.tau_bound,
                              cfg.criterion.grid);
    report = best.report;
    chosen = best.choice;
  } else {
    report = theorem1_certificate(cfg.dyn, cfg.top, cfg.dom, in);
  }

  if (format == "json") {
    std::cout << report_to_json(report) << '\n';
  } else {
    if (chosen) std::cout << "eps1 = " << chosen->eps1 << "\neps2 = " << chosen->eps2 << '\n';
    std::cout << format_report(report);
    if (compare) {
      std::cout << "\n" << std::left << std::setw(10) << "quantity" << std::setw(20)
                << "computed" << std::setw(20) << "reference" << "difference\n";
      std::cout << std::setprecision(10);
      for (const auto& ref : kReference) {
        double v = report_value(report, ref.name);
        std::cout << std::setw(10) << ref.name << std::setw(20) << v << std::setw(20)
                  << ref.value << v - ref.value << '\n';
      }
    }
  }
  return report.verdict == Verdict::synchronizes ? kOk : kFailed;
}

int run_simulate(const std::string& path, std::string csv, double dt, int points,
                 std::optional<std::uint64_t> seed, const std::string& dump) {
  auto cfg = load_config(path);
  if (dt > 0) cfg.simulation.dt = dt;
  if (points > 0) cfg.simulation.points = points;
  if (seed && cfg.schedule.generate) cfg.schedule.generate->seed = *seed;
  if (csv.empty()) csv = cfg.output.csv;
  if (csv.empty()) throw Error("simulate: no output path (use -o or output.csv)");

  auto sim_cfg = cfg.sim_config();
  for (const auto& w : sim_warnings(sim_cfg)) std::cerr << "warning: " << w << '\n';

  ErrorTrajectory traj;
  try {
    traj = simulate(sim_cfg);
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << '\n';
    return kFailed;
  }
  std::ofstream out(csv);
  if (!out) throw Error("cannot write " + csv);
  write_trajectory_csv(traj, out);

  if (!dump.empty()) {
    // Re-run to capture the final state; runs are deterministic.
    Simulator sim(sim_cfg);
    auto state = sim.initial_state();
    const long steps = std::lround(sim_cfg.horizon / sim_cfg.dt);
    for (long s = 0; s < steps; ++s) sim.step(state);
    write_field_dump(sim, state, dump);
  }

  std::cout << std::setprecision(12) << "initial error_norm = " << traj.error_norms.front()
            << "\nfinal error_norm = " << traj.error_norms.back() << '\n';
  return kOk;
}

int run_schedule_gen(double theta, double omega, double horizon, std::uint64_t seed,
                     const std::string& out_path) {
  auto sched = generate_random(theta, omega, horizon, seed);
  auto text = format_schedule(sched);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    out << text;
  }
  auto to = theta_omega(sched);
  std::cerr << std::setprecision(12) << "theta = " << to.theta << ", omega = " << to.omega
            << ", rho_star = " << rho_star(sched) << '\n';
  return kOk;
}

int run_preset(const std::string& name, const std::string& out_path) {
  auto text = dump_config(preset_by_name(name));
  if (out_path.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
  return kOk;
}

struct Lemma3Args {
  double beta1 = 0;
  double alpha2 = 0;
  double beta3 = 0;
  double tau = 0;
  double horizon = 50;
  std::string schedule_file;
  std::string preset = "static";
  std::string csv;
};

int run_verify_lemma3(const Lemma3Args& a) {
  IntermittentSchedule sched;
  if (!a.schedule_file.empty()) {
    std::ifstream in(a.schedule_file);
    if (!in) throw Error("cannot open " + a.schedule_file);
    sched = parse_schedule(in);
  } else {
    auto preset = preset_by_name(a.preset);
    preset.schedule.repeat_to = std::max(a.horizon, preset.schedule.repeat_to.value_or(0.0));
    sched = preset.build_schedule();
  }
  auto result = comparison_bound_check(a.beta1, a.alpha2, a.beta3, sched, a.tau, a.horizon);
  std::cout << std::setprecision(12) << "lambda = " << result.lambda
            << "\nrho_star = " << result.rho_star << "\ndelta = " << result.delta
            << "\nworst V(t) exp(delta t) = " << result.worst_ratio
            << "\nbound holds = " << (result.holds ? "true" : "false") << '\n';
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw Error("cannot write " + a.csv);
    out << "t,V\n" << std::setprecision(15);
    for (std::size_t i = 0; i < result.times.size(); ++i)
      out << result.times[i] << ',' << result.values[i] << '\n';
  }
  return result.holds ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronization certificates and simulations for pinned, "
               "intermittently controlled reaction-diffusion networks"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::string format;
  std::string tune;
  bool compare = false;
  auto* certify = app.add_subcommand("certify", "Compute the synchronization certificate");
  certify->add_option("config", cfg_path, "Experiment config")->required();
  certify->add_flag("--compare-reference", compare, "Show published reference values alongside");
  certify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  certify->add_option("--tune", tune, "Epsilon grid 'e1 e2; e1 e2; ...'");

  std::string csv;
  double dt = 0;
  int points = 0;
  std::optional<std::uint64_t> seed;
  std::string dump;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the network simulation");
  simulate_cmd->add_option("config", cfg_path, "Experiment config")->required();
  simulate_cmd->add_option("-o,--output", csv, "Trajectory CSV path");
  simulate_cmd->add_option("--dt", dt, "Time step override")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--grid", points, "Interior grid points override")->check(CLI::Range(3, 100000));
  simulate_cmd->add_option("--seed", seed, "Seed override for generated schedules");
  simulate_cmd->add_option("--dump-fields", dump, "Write the final fields to this path");

  double theta = 0, omega = 0, horizon = 100;
  std::uint64_t gen_seed = 1;
  std::string out_path;
  auto* gen = app.add_subcommand("schedule-gen", "Generate a random intermittent schedule");
  gen->add_option("--theta", theta, "Smallest control width")->required();
  gen->add_option("--omega", omega, "Largest span width")->required();
  gen->add_option("--horizon", horizon, "Time to cover");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("-o,--output", out_path, "Output file (default stdout)");

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Print a bundled experiment config");
  preset->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  preset->add_option("-o,--output", out_path, "Output file (default stdout)");

  Lemma3Args lemma;
  auto* verify = app.add_subcommand("verify-lemma3", "Integrate the comparison system and check its decay bound");
  verify->add_option("--beta1", lemma.beta1)->required();
  verify->add_option("--alpha2", lemma.alpha2)->required();
  verify->add_option("--beta3", lemma.beta3)->required();
  verify->add_option("--tau", lemma.tau)->required();
  verify->add_option("--horizon", lemma.horizon);
  verify->add_option("--schedule", lemma.schedule_file, "Schedule file ('t s' per line)");
  verify->add_option("--preset-schedule", lemma.preset, "Use a preset's schedule")
      ->check(CLI::IsMember(preset_names()));
  verify->add_option("-o,--output", lemma.csv, "Write the V(t) trajectory as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*certify) return run_certify(cfg_path, compare, format, tune);
    if (*simulate_cmd) return run_simulate(cfg_path, csv, dt, points, seed, dump);
    if (*gen) return run_schedule_gen(theta, omega, horizon, gen_seed, out_path);
    if (*preset) return run_preset(preset_name, out_path);
    if (*verify) return run_verify_lemma3(lemma);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
