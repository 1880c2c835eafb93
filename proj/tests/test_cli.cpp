#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tamed/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>

using namespace tamed;

namespace {

/// Temp directory shared by the whole binary run.
const std::string& work_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/tamed_cli_XXXXXX";
    const char* d = mkdtemp(tmpl);
    if (!d) throw std::runtime_error("mkdtemp failed");
    return std::string(d);
  }();
  return dir;
}

/// Runs a full shell command, redirecting stdout/stderr into files under the
/// temp dir; returns the process exit code.
int run_raw(const std::string& cmd_head, const std::string& tag) {
  const std::string cmd = cmd_head + " > " + work_dir() + "/" + tag + ".out 2> " +
                          work_dir() + "/" + tag + ".err";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

/// Runs the CLI with the given arguments.
int run_cli(const std::string& args, const std::string& tag) {
  return run_raw(std::string(TAMED_SDE_BIN) + " " + args, tag);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

nlohmann::json slurp_json(const std::string& path) {
  return nlohmann::json::parse(slurp(path));
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

const std::string kRateArgs =
    "rate --problem ou --xi 0.1 --n-list 16,32,64 --n-ref 512 --paths 200 --seed 42";

}  // namespace

TEST_CASE("rate: files, slope, and summary line") {
  const std::string stem = work_dir() + "/rate_ou";
  CHECK(run_cli(kRateArgs + " --out " + stem, "rate") == 0);
  REQUIRE(exists(stem + ".csv"));
  REQUIRE(exists(stem + ".json"));
  REQUIRE(exists(stem + ".log2"));

  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.find("# problem: ou") != std::string::npos);
  CHECK(csv.find("# scheme: taylor15") != std::string::npos);
  CHECK(csv.find("# taming: on") != std::string::npos);
  CHECK(csv.find("# seed: 42") != std::string::npos);
  CHECK(csv.find("N,rms_error,std_error,explosions") != std::string::npos);

  const nlohmann::json j = slurp_json(stem + ".json");
  CHECK(j.at("theoretical_rate").get<double>() == 1.5);
  const double slope = j.at("rate_fit").at("slope").get<double>();
  CHECK(slope > 1.3);
  CHECK(slope < 1.7);
  CHECK(j.at("config").at("paths").get<int>() == 200);
  CHECK(j.at("rows").size() == 3);

  const std::string log2 = slurp(stem + ".log2");
  CHECK(std::count(log2.begin(), log2.end(), '\n') == 4);  // header + 3 rows

  const std::string out = slurp(work_dir() + "/rate.out");
  CHECK(out.find("fitted slope") != std::string::npos);
  CHECK(out.find("theoretical rate") != std::string::npos);
}

TEST_CASE("rate output is byte-identical across thread counts and reruns") {
  const std::string a = work_dir() + "/thr_a";
  const std::string b = work_dir() + "/thr_b";
  const std::string c = work_dir() + "/thr_c";
  CHECK(run_cli(kRateArgs + " --threads 1 --out " + a, "thr1") == 0);
  CHECK(run_cli(kRateArgs + " --threads 2 --out " + b, "thr2") == 0);
  CHECK(run_cli(kRateArgs + " --threads 4 --out " + c, "thr4") == 0);
  const std::string csv_a = slurp(a + ".csv");
  CHECK(csv_a == slurp(b + ".csv"));
  CHECK(csv_a == slurp(c + ".csv"));
  CHECK(slurp(a + ".log2") == slurp(b + ".log2"));
  // Repeat run with identical arguments: identical bytes again.
  CHECK(run_cli(kRateArgs + " --threads 2 --out " + a, "thr1r") == 0);
  CHECK(csv_a == slurp(a + ".csv"));
}

TEST_CASE("rate rejects out-of-range noise without --override") {
  CHECK(run_cli("rate --problem ginzburg --xi 0.5 --n-list 16,32,64 --n-ref 256"
                " --paths 50 --out " + work_dir() + "/loud", "loud") == 1);
  const std::string err = slurp(work_dir() + "/loud.err");
  CHECK(err.find("error") != std::string::npos);
  CHECK_FALSE(exists(work_dir() + "/loud.csv"));
}

TEST_CASE("simulate: singleton step count, explosion reporting, determinism") {
  const std::string stem = work_dir() + "/sim";
  CHECK(run_cli("simulate --problem ginzburg --xi 0.02 --n-list 64 --paths 5 --seed 1"
                " --out " + stem, "sim") == 0);
  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.find("path,terminal,exploded,exploded_at") != std::string::npos);
  CHECK(csv.find("# explosions: 0") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 5 + 1);
  CHECK(csv.find("\n4,") != std::string::npos);  // last path row present

  // Same command, same bytes.
  CHECK(run_cli("simulate --problem ginzburg --xi 0.02 --n-list 64 --paths 5 --seed 1"
                " --out " + work_dir() + "/sim2", "sim2") == 0);
  CHECK(csv == slurp(work_dir() + "/sim2.csv"));

  // The divergence demonstration: untamed from x0 = 10 on the coarse grid.
  const std::string boom = work_dir() + "/boom";
  CHECK(run_cli("simulate --problem ginzburg --xi 0.02 --no-taming --x0 10"
                " --n-list 8 --paths 5 --seed 42 --out " + boom, "boom") == 0);
  const std::string boom_csv = slurp(boom + ".csv");
  CHECK(boom_csv.find("# taming: off") != std::string::npos);
  CHECK(boom_csv.find("# explosions: 5") != std::string::npos);

  // More than one step count is a usage error.
  CHECK(run_cli("simulate --problem ginzburg --n-list 8,16 --paths 5 --out " +
                work_dir() + "/multi", "multi") == 1);
  CHECK(slurp(work_dir() + "/multi.err").find("exactly one step count") !=
        std::string::npos);
}

TEST_CASE("check: verdicts and JSON payload") {
  const std::string stem = work_dir() + "/check_g";
  CHECK(run_cli("check --problem ginzburg --xi 0.02 --out " + stem, "checkg") == 0);
  const nlohmann::json j = slurp_json(stem + ".json");
  CHECK(j.at("ranges").at("min_p0").get<int>() == 22);
  CHECK(j.at("p0").get<double>() == 22.0);
  CHECK(j.at("p1").get<double>() == 3.0);
  CHECK(j.at("report").at("all_pass").get<bool>());
  CHECK(j.at("report").at("entries").size() == 5);
  const std::string out = slurp(work_dir() + "/checkg.out");
  CHECK(out.find("A-2: pass") != std::string::npos);
  CHECK(out.find("min_p0 = 22") != std::string::npos);

  // The calibration problem has no superlinear ranges to check.
  CHECK(run_cli("check --problem ou --out " + work_dir() + "/check_ou", "checkou") == 1);

  // Over-scaled noise: rejected outright without --override ...
  CHECK(run_cli("check --problem ginzburg --xi 0.31 --out " + work_dir() + "/no_ov",
                "noov") == 1);
  CHECK(slurp(work_dir() + "/noov.err").find("error") != std::string::npos);
  // ... and with it, the checks run and fail honestly.
  const std::string ov = work_dir() + "/check_loud";
  CHECK(run_cli("check --problem ginzburg --xi 0.31 --override --out " + ov, "ov") == 1);
  const nlohmann::json jov = slurp_json(ov + ".json");
  CHECK_FALSE(jov.at("report").at("all_pass").get<bool>());
  CHECK(slurp(work_dir() + "/ov.out").find("FAIL") != std::string::npos);
}

TEST_CASE("moments: tamed/untamed contrast table") {
  const std::string stem = work_dir() + "/mom";
  CHECK(run_cli("moments --problem ginzburg --xi 0.02 --x0 10 --n-list 8 --paths 100"
                " --seed 42 --out " + stem, "mom") == 0);
  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.find("N,moment_tamed,explosions_tamed,moment_untamed,explosions_untamed") !=
        std::string::npos);
  // Tamed paths all survive; every untamed path explodes, so the untamed
  // moment is infinite.
  CHECK(csv.find("\n8,") != std::string::npos);
  CHECK(csv.find(",0,inf,100\n") != std::string::npos);
}

TEST_CASE("configuration layering: file under CLI, environment seed fallback") {
  const std::string cfg = work_dir() + "/cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"problem":"ou","xi":0.1,"n_list":[16,32,64],"n_ref":512,)"
        << R"("paths":500,"seed":9})";
  }
  const std::string stem = work_dir() + "/layered";
  CHECK(run_cli("rate --config " + cfg + " --paths 200 --out " + stem, "layer") == 0);
  const nlohmann::json j = slurp_json(stem + ".json");
  CHECK(j.at("config").at("paths").get<int>() == 200);   // CLI wins
  CHECK(j.at("config").at("seed").get<int>() == 9);      // file beats default
  CHECK(j.at("config").at("problem").get<std::string>() == "ou");
  CHECK(slurp(stem + ".csv").find("# seed: 9") != std::string::npos);

  // Environment fallback: weakest explicit layer, beaten by file and CLI.
  const std::string env_stem = work_dir() + "/env_seed";
  CHECK(run_raw("env TAMED_TAYLOR_SEED=7 " + std::string(TAMED_SDE_BIN) +
                    " rate --problem ou --xi 0.1 --n-list 16,32,64 --n-ref 512"
                    " --paths 200 --out " + env_stem,
                "envseed") == 0);
  CHECK(slurp(env_stem + ".csv").find("# seed: 7") != std::string::npos);
  CHECK(run_raw("env TAMED_TAYLOR_SEED=7 " + std::string(TAMED_SDE_BIN) +
                    " rate --config " + cfg + " --paths 200 --out " + env_stem,
                "envfile") == 0);
  CHECK(slurp(env_stem + ".csv").find("# seed: 9") != std::string::npos);
}

TEST_CASE("usage errors and help") {
  CHECK(run_cli("", "noargs") != 0);
  CHECK(run_cli("rate --help", "help") == 0);
  CHECK(slurp(work_dir() + "/help.out").find("--n-list") != std::string::npos);
  CHECK(run_cli("rate --problem bogus --n-list 8,16,32 --n-ref 64 --paths 10 --out " +
                work_dir() + "/bogus", "bogus") == 1);
  CHECK(slurp(work_dir() + "/bogus.err").find("error") != std::string::npos);
}

TEST_CASE("parse_n_list and resolve_config precedence (library level)") {
  CHECK(parse_n_list("16,32,64") == std::vector<int>{16, 32, 64});
  CHECK(parse_n_list(" 8 , 16 ") == std::vector<int>{8, 16});
  CHECK_THROWS_AS(parse_n_list(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_n_list("8,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_n_list("8,,16"), std::invalid_argument);

  // Defaults only.
  unsetenv("TAMED_TAYLOR_SEED");
  const RunConfig base = resolve_config({}, std::nullopt);
  CHECK(base.problem == "ginzburg");
  CHECK(base.seed == 42);
  CHECK(base.N_ref == 8192);

  // Environment seed, then a CLI override on top.
  setenv("TAMED_TAYLOR_SEED", "123", 1);
  CHECK(resolve_config({}, std::nullopt).seed == 123);
  PartialConfig cli;
  cli.seed = 5;
  CHECK(resolve_config(cli, std::nullopt).seed == 5);
  setenv("TAMED_TAYLOR_SEED", "junk", 1);
  CHECK_THROWS_AS(resolve_config({}, std::nullopt), std::invalid_argument);
  unsetenv("TAMED_TAYLOR_SEED");

  // Validation failures surface as exceptions at resolve time.
  PartialConfig bad;
  bad.paths = 0;
  CHECK_THROWS_AS(resolve_config(bad, std::nullopt), std::invalid_argument);
  bad = PartialConfig{};
  bad.scheme = std::string("rk4");
  CHECK_THROWS_AS(resolve_config(bad, std::nullopt), std::invalid_argument);
}
