// ncgft: batch runner for gauge vacuum experiments on matrix algebra
// embeddings.  Thin shell over the ncaf shared library: parse flags, resolve
// the thread count, delegate to the scenario runner, pass its exit code
// through (0 ok, 2 invalid input, 3 non-convergence).
#include <ncaf.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"vacuum sweeps, mass spectra, and diagram checks for matrix algebra embeddings"};
  app.set_version_flag("--version", ncaf_version());

  std::string scenario;
  long long seed = -1;
  std::string out;
  int threads = 0;
  bool no_warm = false;
  app.add_option("--scenario", scenario, "scenario JSON file")->required();
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--out", out, "override the output directory");
  app.add_option("--threads", threads, "worker threads (falls back to NCGFT_THREADS)");
  app.add_flag("--no-warm-start", no_warm, "disable warm starts along sweep paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (threads <= 0) {
    if (const char* env = std::getenv("NCGFT_THREADS")) threads = std::atoi(env);
  }

  char errbuf[8192];
  const int code = ncaf_run_scenario_file(scenario.c_str(), out.empty() ? nullptr : out.c_str(),
                                          seed, threads, no_warm ? 1 : 0, errbuf, sizeof errbuf);
  if (code != 0 && errbuf[0] != '\0') std::fprintf(stderr, "%s\n", errbuf);
  return code;
}
