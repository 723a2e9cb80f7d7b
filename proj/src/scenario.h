// Batch scenarios: a JSON document names one experiment (basis spectrum,
// embedding report, vacuum sweep, discontinuity table, diagram check); the
// runner executes it and writes CSV files plus one JSON mirror into the
// output directory.
#pragma once

#include "krajewski.h"
#include "vacuum.h"

#include <cstdint>
#include <optional>
#include <string>

namespace ncaf {

enum class ScenarioKind { basis, embed, sweep, table, krajewski_check };

struct Scenario {
  ScenarioKind kind = ScenarioKind::sweep;
  std::string name;  // row label for sweep artifacts
  bool has_step = false;
  BratteliStep step;
  AlgebraShape shape;  // basis scenarios
  SweepSpec path;
  MinimizerConfig minimizer;
  bool detect = true;  // locate jumps after 1D sweeps
  uint64_t seed = 1;
  std::string out = ".";
  bool has_diagram = false;
  KrajewskiDiagram diagram;
};

// Parses a scenario document; step and diagram file references are resolved
// against base_dir, the output directory against the working directory.
Scenario load_scenario(const std::string& json_text, const std::string& base_dir);

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool no_warm_start = false;
};

// Exit codes shared by the runner, the shared library, and the binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNoConverge = 3;

// Runs one scenario; artifacts land in sc.out.  Returns an exit code; for a
// nonzero code err_json (when given) receives a machine-readable report.
int run_scenario(const Scenario& sc, std::string* err_json);

// Reads, parses, applies overrides, and runs; parse and I/O problems map to
// the invalid-input exit code.
int run_scenario_file(const std::string& path, const RunOverrides& ov, std::string* err_json);

}  // namespace ncaf
