#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "common/test_util.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int serial = 0;
  std::string out_path = "/tmp/tamc_cli_out_" + std::to_string(getpid()) + "_" +
                         std::to_string(serial++);
  std::string err_path = out_path + ".err";
  std::string cmd =
      env_prefix + std::string(TAMC_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string fixture(const std::string& name) { return tamc::test::fixture_path(name); }

}  // namespace

TEST_CASE("check: a safe file exits 0 with one verdict line per spec") {
  RunResult r = run_cli("check " + fixture("voting.ta"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "SPEC cor: SAFE\n");
}

TEST_CASE("check: the SMT checker refuses an ETA with a usage error") {
  RunResult r = run_cli("check " + fixture("broadcast.eta") + " --checker smt");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("requires an MTA") != std::string::npos);
}

TEST_CASE("check: a violated property exits 1 and emits a trace") {
  RunResult r = run_cli("check " + fixture("broadcast_weak_rc.eta"));
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("SPEC validity: UNSAFE") != std::string::npos);
  CHECK(r.out.find("params: n=") != std::string::npos);
  CHECK(r.out.find("fire r") != std::string::npos);
  CHECK(r.out.find("final:") != std::string::npos);
  CHECK(r.out.find("AC=") != std::string::npos);
}

TEST_CASE("check: --trace writes the counterexample to a file") {
  std::string trace_path = "/tmp/tamc_cli_trace_" + std::to_string(getpid());
  RunResult r =
      run_cli("check " + fixture("broadcast_weak_rc.eta") + " --trace " + trace_path);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("params:") == std::string::npos);  // trace went to the file
  std::ifstream in(trace_path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find("params: n=") == 0);
  std::remove(trace_path.c_str());
}

TEST_CASE("check: identical runs produce byte-identical output") {
  RunResult a = run_cli("check " + fixture("broadcast_weak_rc.eta") + " --checker zcs");
  RunResult b = run_cli("check " + fixture("broadcast_weak_rc.eta") + " --checker zcs");
  CHECK(a.exit_code == b.exit_code);
  CHECK(a.out == b.out);
}

TEST_CASE("check: an exhausted global timeout reports UNKNOWN with exit 2") {
  RunResult r =
      run_cli("check " + fixture("broadcast_weak_rc.eta") + " --checker zcs --timeout 0.001");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("SPEC validity: UNKNOWN") != std::string::npos);
}

TEST_CASE("check: unknown property or file is a usage error") {
  CHECK(run_cli("check " + fixture("voting.ta") + " --property nope").exit_code == 3);
  CHECK(run_cli("check /nonexistent.ta").exit_code == 3);
  CHECK(run_cli("check " + fixture("voting.ta") + " --checker wat").exit_code == 3);
}

TEST_CASE("check: --enumerate-orders prints the order list with witnesses") {
  RunResult r = run_cli("check " + fixture("broadcast_core.eta") + " --enumerate-orders");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("3 threshold order(s)") != std::string::npos);
  CHECK(r.out.find("witness") != std::string::npos);
}

TEST_CASE("oracle: fixed-parameter exploration with and without bounds") {
  RunResult safe = run_cli("oracle " + fixture("voting.ta") + " --params n=4,t=1");
  CHECK(safe.exit_code == 0);
  CHECK(safe.out == "SPEC cor: SAFE\n");

  RunResult unsafe_run =
      run_cli("oracle " + fixture("broadcast_weak_rc.eta") + " --params n=4,t=0,f=2 --bound 40");
  CHECK(unsafe_run.exit_code == 1);
  CHECK(unsafe_run.out.find("SPEC validity: UNSAFE") != std::string::npos);

  // an ETA without a bound is a usage error
  RunResult unbounded =
      run_cli("oracle " + fixture("broadcast.eta") + " --params n=4,t=1,f=1");
  CHECK(unbounded.exit_code == 3);

  // malformed and incomplete parameter lists
  CHECK(run_cli("oracle " + fixture("voting.ta") + " --params n=4").exit_code == 3);
  CHECK(run_cli("oracle " + fixture("voting.ta") + " --params q=4,t=1").exit_code == 3);
}

TEST_CASE("fmt: rendering is stable") {
  RunResult once = run_cli("fmt " + fixture("voting.ta"));
  CHECK(once.exit_code == 0);
  std::string tmp = "/tmp/tamc_cli_fmt_" + std::to_string(getpid()) + ".ta";
  {
    std::ofstream out(tmp);
    out << once.out;
  }
  RunResult twice = run_cli("fmt " + tmp);
  CHECK(twice.exit_code == 0);
  CHECK(twice.out == once.out);
  std::remove(tmp.c_str());
}

TEST_CASE("check: --no-preprocess yields the same verdicts") {
  for (const char* file : {"voting.ta", "broadcast.eta", "broadcast_weak_rc.eta"}) {
    RunResult with = run_cli("check " + fixture(file));
    RunResult without = run_cli("check " + fixture(file) + " --no-preprocess");
    CHECK(with.exit_code == without.exit_code);
    // the verdict lines agree (traces may differ in routing)
    std::string v1 = with.out.substr(0, with.out.find('\n'));
    std::string v2 = without.out.substr(0, without.out.find('\n'));
    CHECK(v1 == v2);
  }
}

TEST_CASE("check: an external SMT-LIB2 solver process can back the checkers") {
  RunResult r = run_cli("check " + fixture("voting.ta") + " --checker zcs --smt-solver " +
                        std::string(TAMC_SMT_BIN));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "SPEC cor: SAFE\n");
}

TEST_CASE("check: TACHECKER_SMT selects the solver when no flag is given") {
  RunResult r = run_cli("check " + fixture("voting.ta") + " --checker zcs",
                        "TACHECKER_SMT=" + std::string(TAMC_SMT_BIN) + " ");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "SPEC cor: SAFE\n");

  RunResult bad = run_cli("check " + fixture("voting.ta") + " --checker zcs",
                          "TACHECKER_SMT=/nonexistent/solver ");
  CHECK(bad.exit_code == 2);  // spawn failure surfaces as UNKNOWN
}
