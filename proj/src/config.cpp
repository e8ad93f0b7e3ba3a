#include "rdsync/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace rdsync {

// ---------------------------------------------------------------------------
// Sections

IntermittentSchedule ScheduleSection::build() const {
  int sources = (listed.empty() ? 0 : 1) + (generate ? 1 : 0) + (file.empty() ? 0 : 1);
  if (sources == 0) throw Error("config: no schedule given");
  if (sources > 1) throw Error("config: give exactly one of schedule.span, schedule.generate, schedule.file");
  if (generate)
    return generate_random(generate->theta, generate->omega, generate->horizon, generate->seed);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error("config: cannot open schedule file " + file);
    return parse_schedule(in);
  }
  if (repeat_to) return repeat_to_cover(listed, *repeat_to);
  return IntermittentSchedule(listed, end.value_or(listed.back().stop));
}

bool SimulationSection::operator==(const SimulationSection& o) const {
  if (initial.size() != o.initial.size()) return false;
  for (std::size_t j = 0; j < initial.size(); ++j)
    if (!same_matrix(initial[j], o.initial[j])) return false;
  return points == o.points && dt == o.dt && horizon == o.horizon &&
         sample_every == o.sample_every && gain == o.gain && psi == o.psi &&
         same_matrix(target, o.target) && record_components == o.record_components;
}

CriterionInputs ExperimentConfig::criterion_inputs() const {
  CriterionInputs in;
  in.eps1 = criterion.eps1;
  in.eps2 = criterion.eps2;
  in.tau_bound = criterion.tau_bound.value_or(dyn.delay.bound);
  in.rho_star = criterion.rho_star ? *criterion.rho_star : rho_star(build_schedule());
  return in;
}

SimConfig ExperimentConfig::sim_config() const {
  SimConfig cfg;
  cfg.dyn = dyn;
  cfg.top = top;
  cfg.dom = dom;
  cfg.points = simulation.points;
  cfg.dt = simulation.dt;
  cfg.horizon = simulation.horizon;
  cfg.schedule = build_schedule();
  cfg.gain = simulation.gain;
  cfg.psi_rate = simulation.psi;
  cfg.initial = simulation.initial;
  cfg.target_initial = simulation.target;
  cfg.sample_every = simulation.sample_every;
  cfg.record_components = simulation.record_components;
  return cfg;
}

// ---------------------------------------------------------------------------
// Text helpers

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::multimap<std::string, Entry> entries)
      : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& entry(const std::string& key) const {
    auto range = entries_.equal_range(key);
    if (range.first == range.second) throw Error("config: missing key " + key);
    if (std::next(range.first) != range.second)
      throw Error(where(std::next(range.first)->second) + "duplicate key " + key);
    return range.first->second;
  }

  std::vector<Entry> all(const std::string& key) const {
    std::vector<Entry> out;
    auto range = entries_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) out.push_back(it->second);
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.line < b.line; });
    return out;
  }

  static std::string where(const Entry& e) {
    return "config line " + std::to_string(e.line) + ": ";
  }

  std::vector<double> numbers(const Entry& e) const {
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(number(e, tok));
    return out;
  }

  static double number(const Entry& e, const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw Error(where(e) + "bad number '" + tok + "'");
    return v;
  }

  double scalar(const std::string& key) const {
    const auto& e = entry(key);
    auto v = numbers(e);
    if (v.size() != 1) throw Error(where(e) + key + " expects one number");
    return v.front();
  }

  double scalar_or(const std::string& key, double fallback) const {
    return has(key) ? scalar(key) : fallback;
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    double v = scalar(key);
    if (v != std::floor(v)) throw Error(where(entry(key)) + key + " expects an integer");
    return static_cast<int>(v);
  }

  Eigen::VectorXd vector(const std::string& key) const {
    auto v = numbers(entry(key));
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  /// Rows separated by ';'.
  std::vector<std::vector<double>> rows(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<std::vector<double>> out;
    std::stringstream in(e.value);
    std::string row;
    while (std::getline(in, row, ';')) {
      Entry sub{row, e.line};
      out.push_back(numbers(sub));
    }
    return out;
  }

  Eigen::MatrixXd matrix(const std::string& key) const {
    auto r = rows(key);
    if (r.empty()) throw Error(where(entry(key)) + key + " is empty");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.front().size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].size() != r.front().size())
        throw Error(where(entry(key)) + key + " has ragged rows");
      for (std::size_t j = 0; j < r[i].size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i][j];
    }
    return m;
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    return has(key) ? entry(key).value : fallback;
  }

 private:
  std::multimap<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.half_widths", "model.C", "model.A", "model.B", "model.eta",
      "model.D", "model.activation", "model.lipschitz_g", "model.lipschitz_h",
      "model.table_x", "model.table_y", "model.delay", "model.delay_bound",
      "coupling.Xi", "coupling.gamma1", "coupling.gamma2", "coupling.sigma",
      "coupling.strength", "coupling.mode",
      "schedule.span", "schedule.end", "schedule.repeat_to", "schedule.generate",
      "schedule.file",
      "criterion.eps1", "criterion.eps2", "criterion.rho_star",
      "criterion.tau_bound", "criterion.grid",
      "simulation.points", "simulation.dt", "simulation.horizon",
      "simulation.sample_every", "simulation.gain", "simulation.psi",
      "simulation.initial", "simulation.target", "simulation.record_components",
      "output.csv", "output.format"};
  return keys;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

bool parse_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw Error(Reader::where(e) + "expected true or false");
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing

ExperimentConfig parse_config(std::istream& in) {
  std::multimap<std::string, Entry> entries;
  std::set<std::string> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected 'section.key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key))
      throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (key != "schedule.span" && entries.count(key))
      throw Error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    sections.insert(key.substr(0, key.find('.')));
    entries.emplace(key, Entry{value, lineno});
  }
  for (const char* required : {"model", "coupling"})
    if (!sections.count(required))
      throw Error(std::string("missing required section: ") + required);

  Reader r(std::move(entries));
  ExperimentConfig cfg;

  // model
  cfg.dom.half_widths = to_std(r.vector("model.half_widths"));
  cfg.dom.m = static_cast<int>(cfg.dom.half_widths.size());
  auto& dyn = cfg.dyn;
  dyn.decay = r.vector("model.C");
  dyn.n = static_cast<int>(dyn.decay.size());
  dyn.weights = r.matrix("model.A");
  dyn.delayed = r.matrix("model.B");
  dyn.bias = r.has("model.eta") ? r.vector("model.eta") : Eigen::VectorXd::Zero(dyn.n);
  dyn.diffusion = r.matrix("model.D");
  std::string act = r.word("model.activation", "tanh");
  if (act == "tanh") {
    dyn.activation.kind = ActivationKind::tanh;
  } else if (act == "custom") {
    dyn.activation.kind = ActivationKind::custom_table;
    dyn.activation.table_x = to_std(r.vector("model.table_x"));
    dyn.activation.table_y = to_std(r.vector("model.table_y"));
  } else {
    throw Error(Reader::where(r.entry("model.activation")) + "activation must be tanh or custom");
  }
  dyn.activation.lipschitz_g = r.scalar_or("model.lipschitz_g", 1.0);
  dyn.activation.lipschitz_h = r.scalar_or("model.lipschitz_h", 1.0);
  {
    const auto& e = r.entry("model.delay");
    std::istringstream words(e.value);
    std::string form;
    words >> form;
    std::vector<double> args;
    std::string tok;
    while (words >> tok) args.push_back(Reader::number(e, tok));
    if (form == "constant" && args.size() == 1) {
      dyn.delay = DelaySpec{DelayForm::constant, args[0], 0.0, args[0]};
    } else if (form == "sinusoidal" && args.size() == 2) {
      dyn.delay = DelaySpec{DelayForm::sinusoidal, args[0], args[1], args[0] + std::abs(args[1])};
    } else {
      throw Error(Reader::where(e) + "delay must be 'constant a' or 'sinusoidal a b'");
    }
    dyn.delay.bound = r.scalar_or("model.delay_bound", dyn.delay.bound);
  }

  // coupling
  auto& top = cfg.top;
  top.xi = r.matrix("coupling.Xi");
  top.N = static_cast<int>(top.xi.rows());
  top.gamma1 = r.has("coupling.gamma1") ? r.vector("coupling.gamma1") : Eigen::VectorXd::Ones(dyn.n);
  top.gamma2 = r.has("coupling.gamma2") ? r.vector("coupling.gamma2") : Eigen::VectorXd::Ones(dyn.n);
  top.sigma = r.scalar("coupling.sigma");
  top.strength = r.scalar("coupling.strength");
  top.mode = parse_coupling_mode(r.word("coupling.mode", "hybrid"));

  // schedule
  for (const auto& e : r.all("schedule.span")) {
    auto v = r.numbers(e);
    if (v.size() != 2) throw Error(Reader::where(e) + "schedule.span expects 't s'");
    cfg.schedule.listed.push_back({v[0], v[1]});
  }
  if (r.has("schedule.end")) cfg.schedule.end = r.scalar("schedule.end");
  if (r.has("schedule.repeat_to")) cfg.schedule.repeat_to = r.scalar("schedule.repeat_to");
  if (r.has("schedule.generate")) {
    const auto& e = r.entry("schedule.generate");
    auto v = r.numbers(e);
    if (v.size() != 4 || v[3] < 0 || v[3] != std::floor(v[3]))
      throw Error(Reader::where(e) + "schedule.generate expects 'theta omega horizon seed'");
    cfg.schedule.generate = GeneratorParams{v[0], v[1], v[2], static_cast<std::uint64_t>(v[3])};
  }
  cfg.schedule.file = r.word("schedule.file", "");

  // criterion
  cfg.criterion.eps1 = r.scalar_or("criterion.eps1", 1.0);
  cfg.criterion.eps2 = r.scalar_or("criterion.eps2", 1.0);
  if (r.has("criterion.rho_star")) cfg.criterion.rho_star = r.scalar("criterion.rho_star");
  if (r.has("criterion.tau_bound")) cfg.criterion.tau_bound = r.scalar("criterion.tau_bound");
  if (r.has("criterion.grid")) {
    for (const auto& row : r.rows("criterion.grid")) {
      if (row.size() != 2) throw Error(Reader::where(r.entry("criterion.grid")) + "grid rows are 'eps1 eps2'");
      cfg.criterion.grid.push_back({row[0], row[1]});
    }
  }

  // simulation
  auto& sim = cfg.simulation;
  sim.points = r.integer("simulation.points", sim.points);
  sim.dt = r.scalar_or("simulation.dt", sim.dt);
  sim.horizon = r.scalar_or("simulation.horizon", sim.horizon);
  sim.sample_every = r.integer("simulation.sample_every", sim.sample_every);
  std::string gain = r.word("simulation.gain", "static");
  if (gain == "static") sim.gain = GainMode::static_gain;
  else if (gain == "adaptive") sim.gain = GainMode::adaptive;
  else throw Error(Reader::where(r.entry("simulation.gain")) + "gain must be static or adaptive");
  sim.psi = r.scalar_or("simulation.psi", sim.psi);
  if (r.has("simulation.initial")) {
    for (const auto& row : r.rows("simulation.initial"))
      sim.initial.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  if (r.has("simulation.target")) sim.target = r.vector("simulation.target");
  if (r.has("simulation.record_components"))
    sim.record_components = parse_bool(r.entry("simulation.record_components"));

  // output
  cfg.output.csv = r.word("output.csv", "");
  cfg.output.format = r.word("output.format", "text");
  if (cfg.output.format != "text" && cfg.output.format != "json")
    throw Error(Reader::where(r.entry("output.format")) + "format must be text or json");

  auto violations = validate_model(cfg.dyn, cfg.dom, cfg.top);
  if (!violations.empty()) {
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw Error(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Dumping

namespace {

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v(i));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  return join(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string join_rows(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    out += join(Eigen::VectorXd(m.row(i).transpose()));
  }
  return out;
}

}  // namespace

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto& dyn = cfg.dyn;
  out << "model.half_widths = " << join(cfg.dom.half_widths) << '\n';
  out << "model.C = " << join(dyn.decay) << '\n';
  out << "model.A = " << join_rows(dyn.weights) << '\n';
  out << "model.B = " << join_rows(dyn.delayed) << '\n';
  out << "model.eta = " << join(dyn.bias) << '\n';
  out << "model.D = " << join_rows(dyn.diffusion) << '\n';
  if (dyn.activation.kind == ActivationKind::tanh) {
    out << "model.activation = tanh\n";
  } else {
    out << "model.activation = custom\n";
    out << "model.table_x = " << join(dyn.activation.table_x) << '\n';
    out << "model.table_y = " << join(dyn.activation.table_y) << '\n';
  }
  out << "model.lipschitz_g = " << fmt(dyn.activation.lipschitz_g) << '\n';
  out << "model.lipschitz_h = " << fmt(dyn.activation.lipschitz_h) << '\n';
  if (dyn.delay.form == DelayForm::constant)
    out << "model.delay = constant " << fmt(dyn.delay.a) << '\n';
  else
    out << "model.delay = sinusoidal " << fmt(dyn.delay.a) << ' ' << fmt(dyn.delay.b) << '\n';
  out << "model.delay_bound = " << fmt(dyn.delay.bound) << '\n';

  const auto& top = cfg.top;
  out << "coupling.Xi = " << join_rows(top.xi) << '\n';
  out << "coupling.gamma1 = " << join(top.gamma1) << '\n';
  out << "coupling.gamma2 = " << join(top.gamma2) << '\n';
  out << "coupling.sigma = " << fmt(top.sigma) << '\n';
  out << "coupling.strength = " << fmt(top.strength) << '\n';
  out << "coupling.mode = " << to_string(top.mode) << '\n';

  const auto& s = cfg.schedule;
  for (const auto& span : s.listed)
    out << "schedule.span = " << fmt(span.start) << ' ' << fmt(span.stop) << '\n';
  if (s.end) out << "schedule.end = " << fmt(*s.end) << '\n';
  if (s.repeat_to) out << "schedule.repeat_to = " << fmt(*s.repeat_to) << '\n';
  if (s.generate)
    out << "schedule.generate = " << fmt(s.generate->theta) << ' ' << fmt(s.generate->omega)
        << ' ' << fmt(s.generate->horizon) << ' ' << s.generate->seed << '\n';
  if (!s.file.empty()) out << "schedule.file = " << s.file << '\n';

  const auto& c = cfg.criterion;
  out << "criterion.eps1 = " << fmt(c.eps1) << '\n';
  out << "criterion.eps2 = " << fmt(c.eps2) << '\n';
  if (c.rho_star) out << "criterion.rho_star = " << fmt(*c.rho_star) << '\n';
  if (c.tau_bound) out << "criterion.tau_bound = " << fmt(*c.tau_bound) << '\n';
  if (!c.grid.empty()) {
    out << "criterion.grid = ";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out << (i ? "; " : "") << fmt(c.grid[i].eps1) << ' ' << fmt(c.grid[i].eps2);
    out << '\n';
  }

  const auto& sim = cfg.simulation;
  out << "simulation.points = " << sim.points << '\n';
  out << "simulation.dt = " << fmt(sim.dt) << '\n';
  out << "simulation.horizon = " << fmt(sim.horizon) << '\n';
  out << "simulation.sample_every = " << sim.sample_every << '\n';
  out << "simulation.gain = " << to_string(sim.gain) << '\n';
  out << "simulation.psi = " << fmt(sim.psi) << '\n';
  if (!sim.initial.empty()) {
    out << "simulation.initial = ";
    for (std::size_t j = 0; j < sim.initial.size(); ++j)
      out << (j ? "; " : "") << join(sim.initial[j]);
    out << '\n';
  }
  if (sim.target.size() > 0) out << "simulation.target = " << join(sim.target) << '\n';
  out << "simulation.record_components = " << (sim.record_components ? "true" : "false") << '\n';

  if (!cfg.output.csv.empty()) out << "output.csv = " << cfg.output.csv << '\n';
  out << "output.format = " << cfg.output.format << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Presets

namespace {

NodeDynamics chaotic_node() {
  NodeDynamics dyn;
  dyn.n = 2;
  dyn.decay = Eigen::Vector2d(1.0, 1.0);
  dyn.weights.resize(2, 2);
  dyn.weights << 2.0, -0.1, -5.0, 3.0;
  dyn.delayed.resize(2, 2);
  dyn.delayed << -1.5, -0.1, -0.2, -2.5;
  dyn.bias = Eigen::Vector2d::Zero();
  dyn.diffusion = Eigen::MatrixXd::Constant(2, 1, 0.1);
  dyn.activation = ActivationSpec{};
  dyn.delay = DelaySpec{DelayForm::sinusoidal, 1.1, 0.2, 1.3};
  return dyn;
}

Eigen::MatrixXd ring_coupling() {
  Eigen::MatrixXd xi(4, 4);
  xi << -2, 1, 0, 1,
         1, -2, 1, 0,
         1, 0, -2, 1,
         0, 1, 1, -2;
  return xi;
}

ExperimentConfig four_node_base() {
  ExperimentConfig cfg;
  cfg.dyn = chaotic_node();
  cfg.dom = SpatialDomain{1, {4.0}};
  cfg.top.N = 4;
  cfg.top.xi = ring_coupling();
  cfg.top.gamma1 = Eigen::Vector2d::Ones();
  cfg.top.gamma2 = Eigen::Vector2d::Ones();
  cfg.top.sigma = 2.0;
  cfg.top.strength = 3.5;
  cfg.top.mode = CouplingMode::hybrid;
  cfg.criterion.eps1 = 6.0989;
  cfg.criterion.eps2 = 0.5;
  cfg.simulation.initial = {Eigen::Vector2d(0.5, 0.8), Eigen::Vector2d(0.6, 0.5),
                            Eigen::Vector2d(0.8, 0.3), Eigen::Vector2d(0.45, 0.2)};
  cfg.simulation.target = Eigen::Vector2d(0.4, 0.6);
  return cfg;
}

}  // namespace

ExperimentConfig preset_static() {
  auto cfg = four_node_base();
  cfg.schedule.listed = {{0, 4.9},         {5, 9.92},       {9.99, 14.89},
                         {14.92, 19.85},   {19.9, 24.83},   {24.87, 29.78},
                         {29.84, 34.8},    {34.82, 39.78},  {39.8, 44.73},
                         {44.79, 49.73},   {49.78, 54.7}};
  cfg.schedule.repeat_to = cfg.simulation.horizon;
  return cfg;
}

ExperimentConfig preset_static_certified() {
  auto cfg = preset_static();
  cfg.top.strength = 250.0;
  return cfg;
}

ExperimentConfig preset_adaptive() {
  auto cfg = four_node_base();
  cfg.schedule.listed = {{0, 3},       {5, 9},      {9.5, 13},  {14, 18},
                         {18.3, 22},   {23, 26.5},  {27, 31},   {31.7, 35},
                         {36, 40.5},   {41, 45.2},  {45.9, 50}};
  cfg.schedule.repeat_to = cfg.simulation.horizon;
  cfg.simulation.gain = GainMode::adaptive;
  cfg.simulation.psi = 0.1;
  return cfg;
}

ExperimentConfig preset_uncoupled() {
  auto cfg = preset_static();
  cfg.top.strength = 0.0;
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"static", "static-c250", "adaptive", "uncoupled"};
}

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "static") return preset_static();
  if (name == "static-c250") return preset_static_certified();
  if (name == "adaptive") return preset_adaptive();
  if (name == "uncoupled") return preset_uncoupled();
  throw Error("unknown preset: " + name);
}

// ---------------------------------------------------------------------------
// Output

double fit_decay_rate(const ErrorTrajectory& traj, double t_start, double t_end) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    double t = traj.times[i];
    if (t < t_start || t > t_end) continue;
    double e = traj.error_norms[i];
    if (!(e > 0.0)) throw Error("cannot fit log of a nonpositive error norm");
    double y = std::log(e);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++count;
  }
  if (count < 2) throw Error("decay fit: need at least two samples in the window");
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw Error("decay fit: degenerate time window");
  return -(n * sxy - sx * sy) / denom;
}

void write_trajectory_csv(const ErrorTrajectory& traj, std::ostream& out) {
  out << "t,error_norm,psi\n";
  out << std::setprecision(15);
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    out << traj.times[i] << ',' << traj.error_norms[i] << ',' << traj.psi_values[i] << '\n';
}

void write_field_dump(const Simulator& sim, const SimState& state,
                      const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot write field dump " + path);
  const Eigen::MatrixXd f = sim.physical_fields(state);
  // Row-major: row j (node, target last), then column k * M + i.
  for (Eigen::Index j = 0; j < f.rows(); ++j)
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      double v = f(j, c);
      bin.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  std::ofstream desc(path + ".txt");
  if (!desc) throw Error("cannot write field dump descriptor " + path + ".txt");
  const auto& cfg = sim.config();
  desc << std::setprecision(17);
  desc << "format = float64 little-endian, row-major\n";
  desc << "rows = " << f.rows() << "  # nodes, then the target\n";
  desc << "nodes = " << cfg.top.N << '\n';
  desc << "neurons = " << cfg.dyn.n << '\n';
  desc << "points = " << sim.grid().points << '\n';
  desc << "cols = " << f.cols() << "  # neuron k at interior point i is column k * points + i\n";
  desc << "dx = " << sim.grid().dx() << '\n';
  desc << "dt = " << cfg.dt << '\n';
  desc << "t = " << state.t << '\n';
}

std::string report_to_json(const CriterionReport& r) {
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  j["d"] = r.d;
  j["alpha1"] = r.alpha1;
  j["alpha2"] = r.alpha2;
  j["alpha3"] = r.alpha3;
  j["alpha4"] = r.alpha4;
  j["beta1"] = r.beta1;
  j["beta3"] = r.beta3;
  j["beta"] = r.beta;
  j["rho_star"] = r.rho_star;
  j["lambda"] = r.lambda ? nlohmann::json(*r.lambda) : nlohmann::json(nullptr);
  j["delta"] = r.delta ? nlohmann::json(*r.delta) : nlohmann::json(nullptr);
  j["p"] = std::vector<double>(r.weights.p.data(), r.weights.p.data() + r.weights.p.size());
  j["verdict"] = to_string(r.verdict);
  return j.dump(2);
}

}  // namespace rdsync
