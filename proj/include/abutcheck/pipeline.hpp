#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "abutcheck/abutment.hpp"
#include "abutcheck/cell_library.hpp"
#include "abutcheck/drc.hpp"
#include "abutcheck/reporting.hpp"
#include "abutcheck/route_fabric.hpp"

namespace abutcheck {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string cell_file;
  std::string tech_file;
  Mode mode = Mode::All;
  std::uint64_t seed = 1;
  std::string min_layer = "M2";
  std::string max_layer = "M3";
  DpOption dpt = DpOption::Precolored;
  double rule_inflation = 1.0;
  Coord boundary_margin = -1;  // negative: 2 * min_spacing of min_layer
  PinPairing pin_pairing = PinPairing::Random;
  int net_degree = 2;
  int jobs = 1;
  Coord die_margin = 0;
  bool straps = true;
  bool dump_routes = false;
  std::string out_dir = "abutcheck_out";
  /// Restricts the library to these cells when non-empty.
  std::vector<std::string> cells;
};

/// Raised for problems with the run as a whole (missing files, bad
/// options); the CLI maps it to exit code 2.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Inputs {
  CellLibrary library;
  TechRules tech;
  std::string cell_text;
  std::string tech_text;
};

/// Reads and parses both input files and applies the cell filter.
Inputs load_inputs(const RunConfig& config, std::ostream& log);

/// Testcells for the configured mode, with die_margin applied to the die.
std::vector<Testcell> build_testcells(const RunConfig& config, const Inputs& inputs);

struct CheckOutcome {
  RunManifest manifest;
  std::vector<TestcellReport> reports;  // testcell order
  std::vector<std::string> route_dumps;  // empty unless config.dump_routes
  std::vector<double> seconds;
  std::vector<CellVerdict> verdicts;
};

/// Route, check and filter every testcell on `config.jobs` workers.
/// Per-testcell failures are recorded in the report, not thrown. Output
/// does not depend on the number of workers.
CheckOutcome check_testcells(const RunConfig& config, const Inputs& inputs, const std::vector<Testcell>& testcells);

/// 0 when no cell is problematic, 1 otherwise.
int exit_status(const CheckOutcome& outcome);

/// Subcommands. Each writes under config.out_dir, logs to `log` and
/// returns the process exit code (0 clean, 1 violations, 2 error).
int cmd_profile(const RunConfig& config, std::ostream& log);
int cmd_generate(const RunConfig& config, std::ostream& log);
int cmd_check(const RunConfig& config, std::ostream& log);
int cmd_run(const RunConfig& config, std::ostream& log);

}  // namespace abutcheck
