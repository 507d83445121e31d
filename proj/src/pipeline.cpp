#include "abutcheck/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "abutcheck/design_io.hpp"

namespace abutcheck {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path, const char* what) {
  if (path.empty()) throw RunError(std::string("no ") + what + " given");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot write '" + path.string() + "'");
  out << text;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

RunManifest make_manifest(const RunConfig& config, const Inputs& inputs, const std::vector<Testcell>& testcells) {
  RunManifest m;
  m.version = kVersion;
  m.seed = config.seed;
  m.mode = to_string(config.mode);
  m.min_layer = config.min_layer;
  m.max_layer = config.max_layer;
  m.dpt = to_string(config.dpt);
  m.rule_inflation = config.rule_inflation;
  m.boundary_margin = config.boundary_margin >= 0
                          ? config.boundary_margin
                          : 2 * inputs.tech.layers[inputs.tech.layer_index(config.min_layer)].min_spacing;
  m.pin_pairing = to_string(config.pin_pairing);
  m.net_degree = config.net_degree;
  m.die_margin = config.die_margin;
  m.straps = config.straps;
  m.cell_file = fs::path(config.cell_file).filename().string();
  m.tech_file = fs::path(config.tech_file).filename().string();
  m.cell_hash = content_hash(inputs.cell_text);
  m.deck_hash = content_hash(inputs.tech_text);
  for (const auto& tc : testcells) m.testcells.push_back(tc.name);
  return m;
}

void validate(const RunConfig& config, const TechRules& tech) {
  if (config.jobs < 1) throw RunError("--jobs must be at least 1");
  if (config.rule_inflation < 1.0) throw RunError("--rule-inflation must be at least 1.0");
  if (config.net_degree < 2) throw RunError("net degree must be at least 2");
  if (config.die_margin < 0) throw RunError("--die-margin must not be negative");
  try {
    (void)RouteGrid(tech, Rect{0, 0, 1, 1}, config.min_layer, config.max_layer);
  } catch (const std::invalid_argument& e) {
    throw RunError(e.what());
  }
}

}  // namespace

Inputs load_inputs(const RunConfig& config, std::ostream& log) {
  Inputs in;
  in.cell_text = read_file(config.cell_file, "cell file");
  in.tech_text = read_file(config.tech_file, "tech file");
  std::vector<Diagnostic> tech_warnings;
  in.tech = parse_tech_rules(in.tech_text, &tech_warnings);
  for (const auto& d : tech_warnings) log << "warning: " << config.tech_file << ": " << d.subject << ": " << d.message << "\n";
  CellParseOptions options;
  options.units_per_micron = in.tech.units_per_micron;
  options.site_row_height = in.tech.site_row_height;
  in.library = parse_cells(in.cell_text, options);
  for (const auto& d : in.library.diagnostics) {
    log << (d.severity == Diagnostic::Severity::Warning ? "warning: " : "rejected: ") << config.cell_file << ":"
        << d.line << ": " << d.subject << ": " << d.message << "\n";
  }
  if (!config.cells.empty()) {
    const std::set<std::string> wanted(config.cells.begin(), config.cells.end());
    std::vector<Cell> kept;
    for (auto& c : in.library.cells) {
      if (wanted.contains(c.name)) kept.push_back(std::move(c));
    }
    for (const auto& name : wanted) {
      if (std::ranges::none_of(kept, [&](const Cell& c) { return c.name == name; })) {
        throw RunError("cell '" + name + "' is not in " + config.cell_file);
      }
    }
    in.library.cells = std::move(kept);
  }
  if (in.library.cells.empty()) throw RunError("no usable cells in " + config.cell_file);
  validate(config, in.tech);
  return in;
}

std::vector<Testcell> build_testcells(const RunConfig& config, const Inputs& inputs) {
  auto testcells = enumerate_library(inputs.library.cells, config.mode);
  if (config.die_margin > 0) {
    for (auto& tc : testcells) tc.die = expanded(tc.die, config.die_margin);
  }
  return testcells;
}

CheckOutcome check_testcells(const RunConfig& config, const Inputs& inputs, const std::vector<Testcell>& testcells) {
  CheckOutcome out;
  out.manifest = make_manifest(config, inputs, testcells);
  const std::size_t n = testcells.size();
  out.reports.resize(n);
  out.seconds.resize(n, 0.0);
  if (config.dump_routes) out.route_dumps.resize(n);

  RouteOptions route_options;
  route_options.seed = config.seed;
  route_options.min_layer = config.min_layer;
  route_options.max_layer = config.max_layer;
  route_options.straps = config.straps;
  route_options.net_degree = config.net_degree;
  route_options.pin_pairing = config.pin_pairing;
  DrcOptions drc_options;
  drc_options.dp = config.dpt;
  drc_options.rule_inflation = config.rule_inflation;
  drc_options.boundary_margin = out.manifest.boundary_margin;
  drc_options.min_layer = config.min_layer;

  auto work = [&](std::size_t i) {
    const Testcell& tc = testcells[i];
    TestcellReport& report = out.reports[i];
    report.drc.testcell = tc.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      RoutedDesign routed = route(tc, inputs.library.cells, inputs.tech, route_options);
      report.drc = run_drc(routed, tc, inputs.tech, drc_options);
      report.unrouted = routed.unrouted;
      report.warnings = routed.warnings;
      if (config.dump_routes) out.route_dumps[i] = dump_routes(routed, inputs.tech);
    } catch (const std::exception& e) {
      report.error = e.what();
    }
    out.seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < n; i = next++) work(i);
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }

  std::set<std::string> masters;
  for (const auto& tc : testcells) {
    for (const auto& inst : tc.instances) masters.insert(inst.cell_name);
  }
  const std::vector<std::string> master_list(masters.begin(), masters.end());
  out.verdicts = cell_verdicts(out.reports, master_list);
  return out;
}

int exit_status(const CheckOutcome& outcome) {
  return std::ranges::any_of(outcome.verdicts, &CellVerdict::problematic) ? 1 : 0;
}

namespace {

int profile_step(const RunConfig& config, const Inputs& inputs, std::ostream& log) {
  const LibraryProfile profile = profile_library(inputs.library.cells);
  const fs::path dir = config.out_dir;
  write_file(dir / "width_histogram.csv", width_histogram_csv(profile));
  write_file(dir / "profile.txt", profile_listing(profile, inputs.tech.units_per_micron));
  log << "profiled " << profile.entries.size() << " cells, min width " << profile.min_width << "\n";
  return 0;
}

int generate_step(const RunConfig& config, const Inputs& inputs, std::ostream& log) {
  auto testcells = enumerate_library(inputs.library.cells, config.mode);
  const fs::path dir = config.out_dir;
  write_file(dir / "netlist.v", emit_verilog(testcells));
  if (config.mode == Mode::AllComboInOneCellOnly) {
    write_file(dir / "def" / "TOP.def", emit_def(combined_def_design(testcells, "TOP", config.die_margin)));
  } else {
    for (const auto& tc : testcells) write_file(dir / "def" / (tc.name + ".def"), emit_def(tc, config.die_margin));
  }
  log << "generated " << testcells.size() << " testcells\n";
  return 0;
}

int check_step(const RunConfig& config, const Inputs& inputs, std::ostream& log) {
  const auto testcells = build_testcells(config, inputs);
  const CheckOutcome outcome = check_testcells(config, inputs, testcells);
  const fs::path dir = config.out_dir;
  const std::string summary = drc_summary(outcome.verdicts);
  write_file(dir / "drc_summary.txt", summary);
  write_file(dir / "report.json", json_report(outcome.manifest, outcome.reports, outcome.verdicts));
  write_file(dir / "manifest.json", manifest_json(outcome.manifest));
  nlohmann::ordered_json timing;
  double total = 0;
  for (std::size_t i = 0; i < testcells.size(); ++i) {
    timing["testcells"][testcells[i].name] = outcome.seconds[i];
    total += outcome.seconds[i];
  }
  timing["total_seconds"] = total;
  timing["jobs"] = config.jobs;
  write_file(dir / "timing.json", timing.dump(2) + "\n");
  for (std::size_t i = 0; i < outcome.route_dumps.size(); ++i) {
    write_file(dir / "routes" / (testcells[i].name + ".txt"), outcome.route_dumps[i]);
  }
  std::size_t failed = 0;
  for (const auto& r : outcome.reports) {
    if (r.error.empty()) continue;
    ++failed;
    log << "error: " << r.drc.testcell << ": " << r.error << "\n";
  }
  if (failed == outcome.reports.size() && failed > 0) throw RunError("every testcell failed");
  log << summary;
  return exit_status(outcome);
}

}  // namespace

int cmd_profile(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] { return profile_step(config, load_inputs(config, log), log); });
}

int cmd_generate(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] { return generate_step(config, load_inputs(config, log), log); });
}

int cmd_check(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] { return check_step(config, load_inputs(config, log), log); });
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const Inputs inputs = load_inputs(config, log);
    if (const int rc = profile_step(config, inputs, log); rc != 0) return rc;
    if (const int rc = generate_step(config, inputs, log); rc != 0) return rc;
    return check_step(config, inputs, log);
  });
}

}  // namespace abutcheck
