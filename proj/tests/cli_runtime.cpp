// Drives the installed binary end to end: exit codes, file outputs and
// byte-identical reruns. Invoked by ctest with the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_runtime <netform-binary>\n");
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path work = fs::temp_directory_path() / "netform_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string quiet = " > /dev/null 2>&1";

  expect(run(bin + " validate" + quiet) == 0, "validate exits 0");
  expect(run(bin + " validate --inject-fault gf" + quiet) == 1,
         "validate with a corrupted field table exits 1");

  expect(run(bin + " solve -p numeric-study -o " + (work / "a").string() +
             quiet) == 0,
         "solve exits 0");
  expect(fs::exists(work / "a" / "policy.txt"), "solve writes policy.txt");

  expect(run(bin + " stationary -p numeric-study --policy " +
             (work / "a" / "policy.txt").string() + " -o " +
             (work / "a").string() + quiet) == 0,
         "stationary consumes the solved policy");
  expect(fs::exists(work / "a" / "chain.txt"), "stationary writes chain.txt");
  expect(run(bin + " stationary -p numeric-study --policy " +
             (work / "missing.txt").string() + quiet) == 1,
         "stationary on a missing policy file exits 1");

  const std::string sim_args =
      " simulate -p wifi-direct-app --seeds 1,2 --strategies proposed,fixed"
      " --set horizon=30";
  expect(run(bin + sim_args + " -o " + (work / "s1").string() + quiet) == 0,
         "simulate exits 0");
  expect(run(bin + sim_args + " -o " + (work / "s2").string() + quiet) == 0,
         "simulate rerun exits 0");
  const std::string csv1 = slurp(work / "s1" / "metrics.csv");
  const std::string csv2 = slurp(work / "s2" / "metrics.csv");
  expect(!csv1.empty(), "metrics.csv is non-empty");
  expect(csv1 == csv2, "identical config and seeds give byte-identical CSV");
  expect(csv1.rfind("time,goodput_mbps,scr,power,links,alg_conn,strategy,seed",
                    0) == 0,
         "CSV header matches the documented columns");

  expect(run(bin + sim_args + " --events -o " + (work / "s3").string() +
             quiet) == 0,
         "simulate --events exits 0");
  expect(fs::exists(work / "s3" / "events.log"), "event log written");

  // Reusing the exported policy reproduces the auto-solved run exactly.
  expect(run(bin + " solve -p wifi-direct-app -o " + (work / "p").string() +
             quiet) == 0,
         "solve on the app preset exits 0");
  expect(run(bin + sim_args + " --policy " +
             (work / "p" / "policy.txt").string() + " -o " +
             (work / "s4").string() + quiet) == 0,
         "simulate with a reused policy exits 0");
  expect(slurp(work / "s4" / "metrics.csv") == csv1,
         "reused policy reproduces the auto-solved CSV");

  expect(run(bin + " sweep -p numeric-study --parameter rho --set horizon=10"
             " --seeds 1 -o " + (work / "sw").string() + quiet) == 0,
         "rho sweep exits 0");
  expect(fs::exists(work / "sw" / "sweep_rho.dat"), "sweep output written");

  if (argc > 2) {
    const std::string example_cfg = argv[2];
    expect(run(bin + " simulate -c " + example_cfg +
               " --set horizon=20 --seeds 1 -o " + (work / "cfg").string() +
               quiet) == 0,
           "the shipped example config runs");
  }

  expect(run(bin + " simulate -p numeric-study --set rho=1.0" + quiet) == 2,
         "rho = 1 is rejected before solving with exit code 2");
  expect(run(bin + " simulate -p numeric-study --set bogus=1" + quiet) == 2,
         "unknown config keys exit 2");
  expect(run(bin + " simulate -c " + (work / "void.cfg").string() + quiet) ==
             2,
         "missing config file exits 2");

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
