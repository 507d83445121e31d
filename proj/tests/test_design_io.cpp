#include <gtest/gtest.h>

#include "abutcheck/design_io.hpp"
#include "support.hpp"

using namespace abutcheck;

namespace {

Cell cell(const std::string& name, Coord w, int rows = 1) {
  Cell c;
  c.name = name;
  c.width = w;
  c.height = 1000 * rows;
  c.height_rows = rows;
  return c;
}

std::vector<Testcell> three_cell_set() {
  const std::vector<Cell> cells{cell("INVX1", 200), cell("NAND2X1", 300), cell("NOR2X1", 300)};
  return enumerate_library(cells, Mode::All);
}

const char* kPlacementListing = R"(VERSION 5.6 ;
DESIGN TOP;
TECHNOLOGY ROUTE ;
UNITS DISTANCE MICRONS 1000 ;
COMPONENTS 4;
- sinst_<typeA>/U1 <TYPEA> + PLACED ( 0 0 ) N ;
- sinst_<typeA>/U2 <TYPEA> + PLACED ( 200 0 ) FN ;
- sinst_<typeA>/U3 <TYPEA> + PLACED ( 400 0 ) FN ;
- sinst_<typeA>/U4 <TYPEA> + PLACED ( 400 0 ) N ;
END COMPONENTS
DIEAREA ( 0 0 ) ( 600 0 ) ;
END DESIGN
)";

}  // namespace

TEST(Verilog, TypeAAModule) {
  const std::vector<Testcell> tcs{make_type_aa(cell("INVX1", 200))};
  const auto mods = netlist_modules(tcs);
  ASSERT_EQ(mods.size(), 2u);
  EXPECT_EQ(mods[0].name, "scell_INVX1");
  ASSERT_EQ(mods[0].instances.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(mods[0].instances[i].first, "U" + std::to_string(i + 1));
    EXPECT_EQ(mods[0].instances[i].second, "INVX1");
  }
  EXPECT_EQ(mods[1].name, "TOP");
  EXPECT_EQ(mods[1].submodule_instances, (std::vector<std::pair<std::string, std::string>>{{"U1", "scell_INVX1"}}));
  const std::string text = emit_verilog(tcs);
  EXPECT_NE(text.find("module scell_INVX1 ();\n  INVX1 U1 (.*);\n"), std::string::npos);
  EXPECT_NE(text.find("  scell_INVX1 U1 ();\nendmodule\n"), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
}

TEST(Verilog, TypeABAlternates) {
  const std::vector<Testcell> tcs{make_type_ab(cell("A", 200), cell("B", 300))};
  const auto mods = netlist_modules(tcs);
  EXPECT_EQ(mods[0].name, "scell_A_B");
  std::vector<std::string> seq;
  for (const auto& [inst, c] : mods[0].instances) seq.push_back(c);
  EXPECT_EQ(seq, (std::vector<std::string>{"B", "A", "B", "A", "B"}));
}

TEST(Verilog, EmptyTop) {
  const auto text = emit_verilog(std::span<const Testcell>{});
  EXPECT_EQ(text, "module TOP ();\nendmodule\n");
  const auto mods = parse_verilog(text);
  ASSERT_EQ(mods.size(), 1u);
  EXPECT_TRUE(mods[0].submodule_instances.empty());
}

TEST(Verilog, RoundTrip) {
  const auto tcs = three_cell_set();
  const auto mods = netlist_modules(tcs);
  EXPECT_EQ(parse_verilog(emit_verilog(tcs)), mods);
  EXPECT_EQ(emit_verilog(tcs), emit_verilog(three_cell_set()));
}

TEST(Verilog, ListingTopModule) {
  const auto mods = parse_verilog(
      "module TOP ();\n"
      "  scell_typeA U1 ();\n"
      "  scell_typeA_typeB U1 ();\n"
      "  mcell_typeA_typeB U2 ();\n"
      "endmodule\n");
  ASSERT_EQ(mods.size(), 1u);
  EXPECT_EQ(mods[0].submodule_instances.size(), 3u);
}

TEST(Verilog, Errors) {
  EXPECT_THROW(parse_verilog("module A ();\n  X U1 (.*);\n"), ParseError);
  EXPECT_THROW(parse_verilog("endmodule\n"), ParseError);
  try {
    parse_verilog("module A ();\n  X U1 ( ;\nendmodule\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
}

TEST(Def, TypeAAPlacement) {
  Testcell tc = make_type_aa(cell("INVX1", 200));
  const DefDesign d = to_def_design(tc);
  EXPECT_EQ(d.design_name, "scell_INVX1");
  ASSERT_EQ(d.components.size(), 4u);
  const Coord xs[] = {0, 200, 400, 600};
  const Orientation os[] = {Orientation::R0, Orientation::MY, Orientation::MY, Orientation::R0};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(d.components[i].x, xs[i]);
    EXPECT_EQ(d.components[i].y, 0);
    EXPECT_EQ(d.components[i].orientation, os[i]);
  }
  EXPECT_EQ(d.die, (Rect{0, 0, 800, 1000}));
  const std::string text = emit_def(d);
  EXPECT_EQ(text.rfind("VERSION 5.6 ;\nDESIGN scell_INVX1 ;\n", 0), 0u);
  EXPECT_NE(text.find("UNITS DISTANCE MICRONS 1000 ;\nCOMPONENTS 4 ;\n"), std::string::npos);
  EXPECT_NE(text.find("- U2 INVX1 + PLACED ( 200 0 ) FN ;\n"), std::string::npos);
  EXPECT_NE(text.find("END COMPONENTS\nDIEAREA ( 0 0 ) ( 800 1000 ) ;\nEND DESIGN\n"), std::string::npos);
  EXPECT_EQ(to_def_design(tc, 50).die, (Rect{-50, -50, 850, 1050}));
}

TEST(Def, EmptyDesign) {
  DefDesign d;
  d.design_name = "EMPTY";
  const std::string text = emit_def(d);
  EXPECT_NE(text.find("COMPONENTS 0 ;"), std::string::npos);
  EXPECT_NE(text.find("DIEAREA ( 0 0 ) ( 0 0 ) ;"), std::string::npos);
  EXPECT_EQ(parse_def(text), d);
}

TEST(Def, ReadsPlacementListing) {
  const DefDesign d = parse_def(kPlacementListing);
  EXPECT_EQ(d.design_name, "TOP");
  EXPECT_EQ(d.components.size(), 4u);
  EXPECT_EQ(d.components[1].orientation, Orientation::MY);
  EXPECT_EQ(d.die, (Rect{0, 0, 600, 0}));
}

TEST(Def, Errors) {
  std::string short_by_one = kPlacementListing;
  short_by_one.erase(short_by_one.find("- sinst_<typeA>/U4"), std::string("- sinst_<typeA>/U4 <TYPEA> + PLACED ( 400 0 ) N ;\n").size());
  EXPECT_THROW(parse_def(short_by_one), ParseError);
  std::string bad_orient = kPlacementListing;
  bad_orient.replace(bad_orient.find(") FN ;"), 6, ") W ;");
  EXPECT_THROW(parse_def(bad_orient), ParseError);
}

TEST(Def, RoundTripAllTestcells) {
  const auto tcs = three_cell_set();
  for (const auto& tc : tcs) {
    const DefDesign d = to_def_design(tc);
    EXPECT_EQ(parse_def(emit_def(d)), d) << tc.name;
  }
  const DefDesign top = combined_def_design(tcs);
  EXPECT_EQ(parse_def(emit_def(top)), top);
}

TEST(Def, CombinedTopKeepsRailParity) {
  std::vector<Cell> cells{cell("A", 200), cell("B", 300), cell("T", 400, 2)};
  const auto tcs = enumerate_library(cells, Mode::AllComboInOneCellOnly);
  const DefDesign top = combined_def_design(tcs);
  std::size_t total = 0;
  for (const auto& tc : tcs) total += tc.instances.size();
  ASSERT_EQ(top.components.size(), total);
  const auto mods = netlist_modules(tcs);
  std::size_t comp = 0;
  for (std::size_t t = 0; t < tcs.size(); ++t) {
    const std::string prefix = mods.back().submodule_instances[t].first + "/";
    for (const auto& inst : tcs[t].instances) {
      const DefComponent& c = top.components[comp++];
      EXPECT_EQ(c.name, prefix + inst.instance_name);
      if (inst.height_rows == 1) {
        EXPECT_TRUE(legal_in_row(c.orientation, static_cast<int>(c.y / 1000)));
      }
      EXPECT_TRUE(contains(top.die, Rect{c.x, c.y, c.x + inst.width, c.y + inst.height}));
    }
  }
}

TEST(DesignIo, ToyLibraryRoundTripIsDeterministic) {
  const auto lib = abutcheck::testing::toy_library();
  const auto tcs = enumerate_library(lib.cells, Mode::All);
  EXPECT_EQ(tcs.size(), 36u);
  const std::string v = emit_verilog(tcs);
  EXPECT_EQ(parse_verilog(v), netlist_modules(tcs));
  for (const auto& tc : tcs) {
    const std::string text = emit_def(tc);
    EXPECT_EQ(emit_def(parse_def(text)), text);
    EXPECT_EQ(text, emit_def(tc));
  }
  EXPECT_EQ(v, emit_verilog(enumerate_library(lib.cells, Mode::All)));
}
