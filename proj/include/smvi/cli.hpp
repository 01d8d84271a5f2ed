#pragma once

#include <iosfwd>
#include <string>

#include "smvi/problems.hpp"

namespace smvi {

// Exit codes: 0 tolerance-terminated and all checks passed; 1 config /
// input / budget problems; 2 a verified inequality failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

struct RunManifest {
  std::string problem_ref;              // name:seed or a .json path
  std::string config_path;              // optional flat-config overrides
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
  long max_iter_override = -1;          // < 0 keeps the config value
  double stop_tol_override = -1.0;      // <= 0 keeps the config value
  int verbosity = 0;
};

// "box:7" / "planted:3" / "l1:5" (generator defaults: box dim 5, planted
// dims 5x3, l1 dim 8 weight 1) or a path to a problem JSON file.
BenchmarkProblem resolve_problem(const std::string& ref);

// Relative paths land in $SMVI_OUT_DIR when that is set.
std::string resolve_output_path(const std::string& path);

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& trace_path, std::ostream& out,
               std::ostream& err);
int cmd_make_problem(const std::string& ref, const std::string& out_path,
                     std::ostream& out, std::ostream& err);

}  // namespace smvi
