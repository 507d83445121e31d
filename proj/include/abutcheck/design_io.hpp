#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abutcheck/abutment.hpp"
#include "abutcheck/errors.hpp"

namespace abutcheck {

/// One structural Verilog module. Leaf cells are bound with `(.*)`,
/// submodules with `()`.
struct NetlistModule {
  std::string name;
  std::vector<std::pair<std::string, std::string>> instances;             // (instance, cell)
  std::vector<std::pair<std::string, std::string>> submodule_instances;   // (instance, module)
  bool operator==(const NetlistModule&) const = default;
};

/// The modules emit_verilog writes: one per testcell, then the top module
/// instantiating each testcell as U1, U2, ...
std::vector<NetlistModule> netlist_modules(std::span<const Testcell> testcells, std::string_view top_name = "TOP");

std::string emit_verilog(std::span<const NetlistModule> modules);
std::string emit_verilog(std::span<const Testcell> testcells, std::string_view top_name = "TOP");

/// Structural subset: module/endmodule and instance lines only. Throws
/// ParseError with line and column.
std::vector<NetlistModule> parse_verilog(std::string_view text);

struct DefComponent {
  std::string name;
  std::string cell;
  Coord x = 0;
  Coord y = 0;
  Orientation orientation = Orientation::R0;
  bool operator==(const DefComponent&) const = default;
};

struct DefDesign {
  std::string design_name;
  int units_per_micron = 1000;
  Rect die;
  std::vector<DefComponent> components;
  bool operator==(const DefDesign&) const = default;
};

/// Placement of one testcell; die_margin grows DIEAREA on every side.
DefDesign to_def_design(const Testcell& tc, Coord die_margin = 0);

/// All testcells stacked bottom-up under one design, each starting on an
/// even row so rail parity holds. Component names are <top inst>/<leaf>,
/// matching the top module of emit_verilog.
DefDesign combined_def_design(std::span<const Testcell> testcells, std::string_view top_name = "TOP",
                              Coord die_margin = 0);

std::string emit_def(const DefDesign& design);
inline std::string emit_def(const Testcell& tc, Coord die_margin = 0) { return emit_def(to_def_design(tc, die_margin)); }

/// Reads the emitted DEF subset (plus TECHNOLOGY and other one-line header
/// statements). Throws ParseError on a COMPONENTS count mismatch or an
/// unknown orientation.
DefDesign parse_def(std::string_view text);

}  // namespace abutcheck
