#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "c0ip/adapt.hpp"

namespace c0ip {

// Batch-run configuration. sigma = 0 means "pick the default for the degree"
// (6 for quadratics, 18 for cubics).
struct RunConfig {
  std::string problem = "example1";
  int degree = 2;
  double sigma = 0.0;
  double theta = 0.5;
  RefineMode mode = RefineMode::adaptive;
  int max_dof = 10000;
  std::string output_dir = ".";
  bool dump_mesh = false;
  bool dump_estimator = false;
  double solver_tol = 1e-10;
  double pdas_c = 100.0;
  // set when --help was requested; help_text then holds the usage message
  bool show_help = false;
  std::string help_text;

  double resolved_sigma() const;
  // Every violated invariant at once, each message naming the field.
  std::vector<std::string> validate() const;
};

// Flags override config-file values override defaults. The file holds
// key=value lines (keys match the long flags with underscores), blank lines
// and # comments allowed. Throws std::invalid_argument on unknown keys or
// malformed values.
RunConfig parse_config(const std::vector<std::string>& args);

// Full study: solve, post-pass reference errors when no exact solution is
// known, and write history.csv (plus optional per-level mesh and estimator
// dumps) into output_dir. Returns 0 on success, 2 on validation errors,
// 1 on runtime failure; diagnostics go to the error stream.
int run(const RunConfig& config);

// history.csv serialization; values print with %.17g so a read-back
// reproduces every record exactly.
void write_history_csv(std::ostream& os, const std::vector<LevelRecord>& history);
std::vector<LevelRecord> read_history_csv(std::istream& is);

// Estimator breakdown with columns entity_type,entity_id,term,value.
void write_estimator_csv(std::ostream& os, const EstimatorReport& report);

}  // namespace c0ip
