#include <doctest.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  fs::path log = fs::temp_directory_path() / ("lfa_cli_out_" + std::to_string(counter++));
  std::string cmd = env + " " + std::string(LFA_CLI_PATH) + " " + args + " > " +
                    log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  fs::remove(log);
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lfa_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("chain build writes a chain with its config sidecar") {
  TempDir dir;
  CmdResult res = run_cli("chain build --model scu-sys --n 2 --out " + dir.file("c.json"));
  CHECK(res.exit_code == 0);
  std::string chain = slurp(dir.file("c.json"));
  CHECK(chain.find("\"num_states\": 5") != std::string::npos);
  std::string sidecar = slurp(dir.file("c.config.json"));
  CHECK(sidecar.find("\"command\": \"chain build\"") != std::string::npos);
  CHECK(sidecar.find("\"model\": \"scu-sys\"") != std::string::npos);

  CmdResult dot = run_cli("chain build --model fai-glob --n 3 --out " + dir.file("g.dot"));
  CHECK(dot.exit_code == 0);
  CHECK(slurp(dir.file("g.dot")).find("digraph chain") != std::string::npos);
}

TEST_CASE("chain solve reports the stationary solution and latency") {
  CmdResult res = run_cli("chain solve --model scu-sys --n 2");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"latency\": 2.857142857142857") != std::string::npos);
  CHECK(res.output.find("\"period\": 2") != std::string::npos);

  TempDir dir;
  CmdResult build = run_cli("chain build --model fai-glob --n 3 --out " + dir.file("f.json"));
  REQUIRE(build.exit_code == 0);
  CmdResult solve = run_cli("chain solve --in " + dir.file("f.json"));
  CHECK(solve.exit_code == 0);
  CHECK(solve.output.find("\"mu\": 0.529411764705882") != std::string::npos);  // 9/17
}

TEST_CASE("lifting verify passes, and the corrupted map is a negative control") {
  CmdResult good = run_cli("lifting verify --model scu --n 2");
  CHECK(good.exit_code == 0);
  CHECK(good.output.find("pass") != std::string::npos);

  CmdResult bad = run_cli("lifting verify --model scu --n 2 --corrupt-map");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("fail") != std::string::npos);

  CmdResult parallel = run_cli("lifting verify --model parallel --n 2 --q 3");
  CHECK(parallel.exit_code == 0);
}

TEST_CASE("usage errors exit with status two") {
  CHECK(run_cli("lifting verify --model nosuch --n 2").exit_code == 2);
  CHECK(run_cli("definitely-not-a-command").exit_code == 2);
  CHECK(run_cli("sim run --model scu --n 2 --steps 100 --out x.csv").exit_code == 2);  // no seed
  CHECK(run_cli("chain build --model scu-ind --n 99 --out /tmp/x.json").exit_code == 2);  // cap
  TempDir dir;
  CHECK(run_cli("sweep --model scu --mode sim --n 2,4 --out " + dir.file("s.csv"))
            .exit_code == 2);  // sim mode without seed
}

TEST_CASE("sim run writes stats rows and identical reruns are byte-identical") {
  TempDir dir;
  std::string cmd = "sim run --model scu --n 2 --steps 30000 --seed 4 --out ";
  CHECK(run_cli(cmd + dir.file("a.csv")).exit_code == 0);
  CHECK(run_cli(cmd + dir.file("b.csv")).exit_code == 0);
  std::string a = slurp(dir.file("a.csv"));
  CHECK(a == slurp(dir.file("b.csv")));
  CHECK(a.find("model,n,q,s,steps,seed,W_emp,Wi_emp_min,Wi_emp_max,completion_rate") == 0);
  CHECK(a.find("scu,2,0,1,30000,4,") != std::string::npos);

  CmdResult trace = run_cli(
      "sim run --model scu --n 2 --steps 500 --seed 4 --out " + dir.file("t.json"));
  CHECK(trace.exit_code == 0);
  std::string t = slurp(dir.file("t.json"));
  CHECK(t.find("\"completions\"") != std::string::npos);
  CHECK(t.find("\"success_steps\"") != std::string::npos);

  CmdResult unbounded = run_cli(
      "sim run --model unbounded --n 4 --steps 4000 --seed 2 --out " + dir.file("u.json"));
  CHECK(unbounded.exit_code == 0);
  CHECK(slurp(dir.file("u.json")).find("\"monopoly\"") != std::string::npos);
}

TEST_CASE("crashed and weighted schedules are accepted") {
  TempDir dir;
  CmdResult crash = run_cli(
      "sim run --model scu --n 4 --steps 30000 --seed 5 --crash 2:0,3:1000 --out " +
      dir.file("c.csv"));
  CHECK(crash.exit_code == 0);

  CmdResult weighted = run_cli(
      "sim run --model scu --n 2 --steps 30000 --seed 5 --weights 0.6,0.4 --theta 0.4 --out " +
      dir.file("w.csv"));
  CHECK(weighted.exit_code == 0);

  CmdResult invalid = run_cli(
      "sim run --model scu --n 2 --steps 100 --seed 5 --weights 0.6,0.4 --out " +
      dir.file("x.csv"));
  CHECK(invalid.exit_code == 2);  // weights without theta
}

TEST_CASE("bins run emits the pinned CSV schema deterministically") {
  TempDir dir;
  std::string cmd = "bins run --n 4 --phases 50 --seed 6 --out ";
  CHECK(run_cli(cmd + dir.file("p1.csv")).exit_code == 0);
  CHECK(run_cli(cmd + dir.file("p2.csv")).exit_code == 0);
  std::string csv = slurp(dir.file("p1.csv"));
  CHECK(csv == slurp(dir.file("p2.csv")));
  CHECK(csv.find("phase_index,a_start,b_start,length,range") == 0);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 51);
}

TEST_CASE("sweep writes rows, fit, and curve files") {
  TempDir dir;
  CmdResult res = run_cli(
      "sweep --model parallel --mode exact --n 2,4,8 --q 5 --out " + dir.file("s.csv") +
      " --fit-out " + dir.file("fit.json") + " --curve-out " + dir.file("curve.dat"));
  CHECK(res.exit_code == 0);
  std::string csv = slurp(dir.file("s.csv"));
  CHECK(csv.find("n,k_correct,q,s,W,W_over_sqrt_n,completion_rate,source") == 0);
  CHECK(csv.find("2,2,5,1,5,") != std::string::npos);
  CHECK(slurp(dir.file("fit.json")).find("\"degenerate\": true") != std::string::npos);
  CHECK(slurp(dir.file("curve.dat")).find("# n completion_rate") == 0);

  CmdResult bins = run_cli(
      "sweep --model scu --mode bins --n 2,4 --phases 2000 --seed 11 --out " +
      dir.file("b.csv"));
  CHECK(bins.exit_code == 0);
  CHECK(slurp(dir.file("b.csv")).find("bins") != std::string::npos);
}

TEST_CASE("crash-sweep emits one row with the surviving count") {
  TempDir dir;
  CmdResult res = run_cli(
      "crash-sweep --n 4 --k 2 --steps 100000 --seed 8 --out " + dir.file("c.csv"));
  CHECK(res.exit_code == 0);
  std::string csv = slurp(dir.file("c.csv"));
  CHECK(csv.find("4,2,0,1,") != std::string::npos);
  CHECK(csv.find("crash-sim") != std::string::npos);
}

TEST_CASE("relative outputs land under the directory environment variable") {
  TempDir dir;
  CmdResult res = run_cli("bins run --n 2 --phases 10 --seed 1 --out sub/out.csv",
                          "LFA_OUT_DIR=" + dir.path.string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir.path / "sub" / "out.csv"));
  CHECK(fs::exists(dir.path / "sub" / "out.config.json"));
}

TEST_CASE("full precision flag widens CSV numbers") {
  TempDir dir;
  CHECK(run_cli("sim run --model scu --n 2 --steps 10000 --seed 1 --out " + dir.file("lo.csv"))
            .exit_code == 0);
  CHECK(run_cli("sim run --model scu --n 2 --steps 10000 --seed 1 --full-precision --out " +
                dir.file("hi.csv"))
            .exit_code == 0);
  std::string lo = slurp(dir.file("lo.csv"));
  std::string hi = slurp(dir.file("hi.csv"));
  CHECK(lo.find("2.87057,") != std::string::npos);
  CHECK(hi.find("2.8705678869991353") != std::string::npos);
  CHECK(hi.size() > lo.size());
}
