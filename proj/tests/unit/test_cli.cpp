#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RTWT_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
    r.out += buf.data();
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "rtwt_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("model on the default config") {
  const auto r = run("model");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["loss_prob"].get<double>() == doctest::Approx(1e-3).epsilon(1e-12));
  for (const char* key : {"mean_delay_s", "jitter_s", "loss_prob", "percentile_s", "percentile_q",
                          "capacity", "overflow_prob"}) {
    CHECK(j.contains(key));
  }
  CHECK(run("model --format table").code == 0);
}

TEST_CASE("pmf output sums to one") {
  const auto path = scratch_dir() / "pmf.csv";
  REQUIRE(run("model --pmf " + path.string()).code == 0);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  CHECK(line == "delay_slots,delay_s,probability");
  double total = 0.0;
  while (std::getline(in, line)) {
    total += std::stod(line.substr(line.rfind(',') + 1));
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);
}

TEST_CASE("exit codes") {
  const auto dir = scratch_dir();
  {
    std::ofstream f(dir / "missing.json");
    f << R"({"traffic": {"interarrival": "16ms"}, "link": {"error_prob": 0.1, "retry_limit": 3},
            "rtwt": {"period": "10ms", "sp_slots": 3}, "buffer": 20})";
  }
  const auto missing = run("model --config " + (dir / "missing.json").string());
  CHECK(missing.code == 2);
  CHECK(missing.out.find("traffic.packet_duration") != std::string::npos);

  CHECK(run("model --set rtwt.period=10").code == 2);
  CHECK(run("model --set nonsense.key=1").code == 2);
  CHECK(run("model --config /nonexistent/file.json").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("experiment fig9").code == 2);
  {
    std::ofstream f(dir / "silent.json");
    f << R"({"traffic": {"packet_duration": "114.4us", "rate": "0/s"},
            "link": {"error_prob": 0.1, "retry_limit": 3},
            "rtwt": {"period": "10ms", "sp_slots": 3}, "buffer": 20})";
  }
  CHECK(run("model --config " + (dir / "silent.json").string()).code == 3);
  CHECK(run("simulate --set sim.max_sim_time=1s").code == 4);
}

TEST_CASE("simulate is reproducible byte for byte") {
  const std::string args = "simulate --seed 5 --set sim.measured_packets=20000 --set sim.warmup_packets=100";
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["mean_delay_s"]["ci95"].get<double>() > 0.0);

  const auto trace = scratch_dir() / "trace.csv";
  REQUIRE(run(args + " --trace " + trace.string()).code == 0);
  CHECK(slurp(trace).rfind("time_s,event,queue_len\n", 0) == 0);
}

TEST_CASE("optimize reports infeasibility without failing") {
  const auto r = run("optimize --set qos.target=50us --set grid.period_max=2ms");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK_FALSE(j["feasible"].get<bool>());
}

TEST_CASE("validate writes the fixed CSV header") {
  const auto r = run("validate --axis period --values 4ms,8ms --set sim.measured_packets=5000 "
                     "--set sim.warmup_packets=100");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("axis,mean_ana,mean_sim,mean_sim_ci,jitter_ana,jitter_sim,loss_ana,loss_sim,"
                    "pctl_ana,pctl_sim,err_pctl_abs,error\n",
                    0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
  CHECK(run("validate --axis period --values 0.1ms --set sim.measured_packets=100").code == 3);
  CHECK(run("validate --axis speed --values 1ms").code == 2);
}

TEST_CASE("emit-config round trip") {
  const auto dir = scratch_dir();
  const auto first = run("emit-config --set rtwt.period=6ms --set sim.runs=3 --out " +
                         (dir / "a.json").string());
  REQUIRE(first.code == 0);
  const auto second = run("emit-config --config " + (dir / "a.json").string());
  REQUIRE(second.code == 0);
  CHECK(nlohmann::json::parse(second.out) == nlohmann::json::parse(slurp(dir / "a.json")));
}

TEST_CASE("experiment writes its tables") {
  const auto dir = scratch_dir() / "fig5";
  fs::remove_all(dir);
  const auto r = run("experiment fig5 --set grid.period_step=1ms --out " + dir.string());
  REQUIRE(r.code == 0);
  for (const char* name : {"fig5_percentile.csv", "fig5_mean_delay.csv", "fig5_jitter.csv"}) {
    const std::string text = slurp(dir / name);
    CHECK(text.rfind("target_ms,T_star_ms,N_star,capacity,capacity_floor,feasible,achieved_ms\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 31);
  }
}
