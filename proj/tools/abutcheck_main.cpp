// abutcheck: standard-cell abutment verification from the command line.
//
//   abutcheck run lib.lef --tech rules.tech --mode all --out-dir out
//
// Every option can also be set through ABUTCHECK_<OPTION> (e.g.
// ABUTCHECK_SEED=7); flags win over the environment.

#include <iostream>

#include <CLI11.hpp>

#include "abutcheck/pipeline.hpp"

namespace {

using abutcheck::RunConfig;

// Enum-valued options are captured as text and converted after parsing.
struct EnumText {
  std::string mode = "all";
  std::string dpt = "precolored";
  std::string pin_pairing = "random";
};

void add_common(CLI::App& cmd, RunConfig& c, EnumText& e, bool checking) {
  cmd.add_option("cell_file", c.cell_file, "Cell library (LEF subset)")->required()->envname("ABUTCHECK_CELL_FILE");
  cmd.add_option("--tech", c.tech_file, "Rules deck")->required()->envname("ABUTCHECK_TECH");
  cmd.add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str()->envname("ABUTCHECK_OUT_DIR");
  cmd.add_option("--cells", c.cells, "Only use these cells")->delimiter(',')->envname("ABUTCHECK_CELLS");
  cmd.add_option("--mode", e.mode, "Verification mode")
      ->check(CLI::IsMember({"single_cell_only", "cell_by_cell_only", "all_combo_in_one_cell_only", "all"}))
      ->capture_default_str()
      ->envname("ABUTCHECK_MODE");
  cmd.add_option("--die-margin", c.die_margin, "Halo added around each DIEAREA, database units")
      ->capture_default_str()
      ->envname("ABUTCHECK_DIE_MARGIN");
  if (!checking) return;
  cmd.add_option("--seed", c.seed, "Seed for pin pairing and straps")->capture_default_str()->envname("ABUTCHECK_SEED");
  cmd.add_option("--min-layer", c.min_layer, "Lowest routing layer")->capture_default_str()->envname("ABUTCHECK_MIN_LAYER");
  cmd.add_option("--max-layer", c.max_layer, "Highest routing layer")->capture_default_str()->envname("ABUTCHECK_MAX_LAYER");
  cmd.add_option("--dpt", e.dpt, "Double patterning check")
      ->check(CLI::IsMember({"precolored", "recolor", "off"}))
      ->capture_default_str()
      ->envname("ABUTCHECK_DPT");
  cmd.add_option("--rule-inflation", c.rule_inflation, "Scale min spacing/width rules (>= 1)")
      ->capture_default_str()
      ->envname("ABUTCHECK_RULE_INFLATION");
  cmd.add_option("--boundary-margin", c.boundary_margin,
                 "Half-width of the abutment band, database units (default 2 x min spacing of the min layer)")
      ->envname("ABUTCHECK_BOUNDARY_MARGIN");
  cmd.add_option("--pin-pairing", e.pin_pairing, "How signal pins are joined into nets")
      ->check(CLI::IsMember({"random", "aligned"}))
      ->capture_default_str()
      ->envname("ABUTCHECK_PIN_PAIRING");
  cmd.add_option("--net-degree", c.net_degree, "Pins per random net")->capture_default_str()->envname("ABUTCHECK_NET_DEGREE");
  cmd.add_option("--jobs,-j", c.jobs, "Worker threads")->capture_default_str()->envname("ABUTCHECK_JOBS");
  cmd.add_flag("!--no-straps", c.straps, "Skip random strap blockages")->envname("ABUTCHECK_STRAPS");
  cmd.add_flag("--dump-routes", c.dump_routes, "Write routes/<testcell>.txt")->envname("ABUTCHECK_DUMP_ROUTES");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Standard-cell abutment verification: testcell generation, routing and boundary DRC"};
  app.set_version_flag("--version", abutcheck::kVersion);
  app.require_subcommand(1);

  RunConfig config;
  EnumText text;
  auto* profile = app.add_subcommand("profile", "Cell profile and width histogram");
  auto* generate = app.add_subcommand("generate", "Write Verilog netlist and DEF placements");
  auto* check = app.add_subcommand("check", "Route and check every testcell");
  auto* run = app.add_subcommand("run", "profile, generate and check in one go");
  add_common(*profile, config, text, false);
  add_common(*generate, config, text, false);
  add_common(*check, config, text, true);
  add_common(*run, config, text, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  config.mode = abutcheck::mode_from_string(text.mode);
  config.dpt = abutcheck::dp_option_from_string(text.dpt);
  config.pin_pairing = abutcheck::pin_pairing_from_string(text.pin_pairing);

  if (profile->parsed()) return abutcheck::cmd_profile(config, std::cerr);
  if (generate->parsed()) return abutcheck::cmd_generate(config, std::cerr);
  if (check->parsed()) return abutcheck::cmd_check(config, std::cerr);
  return abutcheck::cmd_run(config, std::cerr);
}
