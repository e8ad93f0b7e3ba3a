// Runs the installed command-line tool and checks exit codes and output.

#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  static int counter = 0;
  fs::path capture = fs::temp_directory_path() / ("rdsync_cli_test_" + std::to_string(++counter));
  std::string cmd = std::string(RDSYNC_CLI) + " " + args + " > " + capture.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(capture);
  return r;
}

std::string cfg(const std::string& name) {
  return std::string(RDSYNC_SOURCE_DIR) + "/configs/" + name;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("certify") {
  auto ok = run("certify " + cfg("static_sync_c250.cfg"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verdict = synchronizes") != std::string::npos);
  CHECK(ok.out.find("delta = 0.420") != std::string::npos);

  auto weak = run("certify " + cfg("uncoupled.cfg"));
  CHECK(weak.code == 1);
  CHECK(weak.out.find("beta1_not_dominant") != std::string::npos);

  auto ref = run("certify " + cfg("static_sync_c250.cfg") + " --compare-reference");
  CHECK(ref.code == 0);
  CHECK(ref.out.find("reference") != std::string::npos);

  auto json = run("certify " + cfg("static_sync_c250.cfg") + " --format json");
  CHECK(json.code == 0);
  CHECK(json.out.find("\"verdict\": \"synchronizes\"") != std::string::npos);

  auto tuned = run("certify " + cfg("static_sync_c250.cfg") + " --tune '6.0989 0.5; 1 1'");
  CHECK(tuned.code == 0);
  CHECK(tuned.out.find("eps1 = ") != std::string::npos);
}

TEST_CASE("usage and config errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("certify /nonexistent.cfg").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("schedule-gen --theta 3 --omega 2").code == 2);
}

TEST_CASE("simulate writes a CSV and is deterministic") {
  fs::path cfg_path = scratch("rdsync_short.cfg");
  {
    auto text = run("preset static").out;
    text.replace(text.find("simulation.horizon = 100"), 24, "simulation.horizon = 0.5");
    std::ofstream(cfg_path) << text;
  }
  fs::path a = scratch("rdsync_a.csv"), b = scratch("rdsync_b.csv"), dump = scratch("rdsync_dump.bin");
  auto first = run("simulate " + cfg_path.string() + " -o " + a.string() + " --grid 31");
  CHECK(first.code == 0);
  auto second = run("simulate " + cfg_path.string() + " -o " + b.string() + " --grid 31 --dump-fields " +
                    dump.string());
  CHECK(second.code == 0);
  auto csv = slurp(a);
  CHECK(csv.rfind("t,error_norm,psi\n", 0) == 0);
  CHECK(csv == slurp(b));
  CHECK(fs::file_size(dump) == 5 * 2 * 31 * sizeof(double));
  CHECK(slurp(dump.string() + ".txt").find("points = 31") != std::string::npos);
  for (const auto& p : {cfg_path, a, b, dump, fs::path(dump.string() + ".txt")}) fs::remove(p);
}

TEST_CASE("schedule-gen and preset") {
  auto gen = run("schedule-gen --theta 2 --omega 2.5 --horizon 20 --seed 3");
  CHECK(gen.code == 0);
  CHECK(gen.out.find("theta = ") != std::string::npos);
  CHECK(run("schedule-gen --theta 2 --omega 2.5 --horizon 20 --seed 3").out == gen.out);

  auto preset = run("preset adaptive");
  CHECK(preset.code == 0);
  CHECK(preset.out.find("simulation.gain = adaptive") != std::string::npos);
  CHECK(run("preset missing").code == 2);
}

TEST_CASE("verify-lemma3") {
  auto ok = run("verify-lemma3 --beta1 113.02437 --alpha2 1 --beta3 46.54818 --tau 1.3");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("bound holds = true") != std::string::npos);

  fs::path sched = scratch("rdsync_sched.txt");
  CHECK(run("schedule-gen --theta 2 --omega 2.5 --horizon 60 --seed 3 -o " + sched.string()).code == 0);
  auto custom = run("verify-lemma3 --beta1 2 --alpha2 1 --beta3 0.3 --tau 0.5 --schedule " + sched.string());
  CHECK(custom.code == 0);
  fs::remove(sched);

  CHECK(run("verify-lemma3 --beta1 1 --alpha2 2 --beta3 0 --tau 1").code == 2);
}
