#include <gtest/gtest.h>

#include <random>

#include "abutcheck/drc.hpp"
#include "support.hpp"

using namespace abutcheck;
using abutcheck::testing::boundary_diff_net;
using abutcheck::testing::brute_force_bipartite;
using abutcheck::testing::components;
using abutcheck::testing::count_rule;
using abutcheck::testing::edge_pin_fixture;
using abutcheck::testing::layout_of;
using abutcheck::testing::one_layer_deck;
using abutcheck::testing::spacing_set;
using abutcheck::testing::toy_tech;
using abutcheck::testing::wire;


TEST(Geometry, SpacingThreshold) {
  const TechRules deck = one_layer_deck();
  const auto close = check_geometry(layout_of({wire("a", {0, 0, 100, 50}), wire("b", {149, 0, 250, 50})}), deck);
  ASSERT_EQ(close.size(), 1u);
  EXPECT_EQ(close[0].rule, Rule::DiffNetSpacing);
  EXPECT_EQ(close[0].location, (Rect{100, 0, 149, 50}));
  EXPECT_EQ(close[0].nets, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(check_geometry(layout_of({wire("a", {0, 0, 100, 50}), wire("b", {150, 0, 250, 50})}), deck).empty());
  const auto swapped = check_geometry(layout_of({wire("b", {149, 0, 250, 50}), wire("a", {0, 0, 100, 50})}), deck);
  EXPECT_EQ(swapped, close);
}

TEST(Geometry, CornerDistanceIsEuclidean) {
  const TechRules deck = one_layer_deck();
  // 30/40 corner offset is 50 apart: legal; 30/39 is not.
  EXPECT_TRUE(check_geometry(layout_of({wire("a", {0, 0, 50, 50}), wire("b", {80, 90, 130, 140})}), deck).empty());
  EXPECT_EQ(check_geometry(layout_of({wire("a", {0, 0, 50, 50}), wire("b", {80, 89, 130, 140})}), deck).size(), 1u);
}

TEST(Geometry, ShortWidthOpenSameNet) {
  const TechRules deck = one_layer_deck();
  EXPECT_EQ(count_rule(check_geometry(layout_of({wire("a", {0, 0, 100, 50}), wire("b", {90, 0, 200, 50})}), deck),
                       Rule::Short),
            1);
  EXPECT_EQ(count_rule(check_geometry(layout_of({wire("a", {0, 0, 100, 40})}), deck), Rule::MinWidth), 1);
  Layout open = layout_of({wire("a", {0, 0, 100, 50}), wire("a", {300, 0, 400, 50})});
  open.signal_nets = {"a"};
  const auto vs = check_geometry(open, deck);
  EXPECT_EQ(count_rule(vs, Rule::Open), 1);
  EXPECT_EQ(count_rule(check_geometry(layout_of({wire("a", {0, 0, 100, 50}), wire("a", {130, 0, 200, 50})}), deck),
                       Rule::SameNetSpacing),
            1);
  EXPECT_TRUE(check_geometry(layout_of({wire("a", {0, 0, 500, 50})}), deck).empty());
}

TEST(Geometry, DisplayNames) {
  EXPECT_EQ(display_name(Rule::DiffNetSpacing), "Diff net spacing");
  EXPECT_EQ(display_name(Rule::SameNetSpacing, LayerKind::Cut), "Same net via-cut spacing");
  EXPECT_EQ(to_string(Rule::DpOddCycle), "DP_ODD_CYCLE");
}

TEST(Boundary, EdgePinCreatesBoundaryViolation) {
  EXPECT_GE(boundary_diff_net(edge_pin_fixture(7)), 1);
  EXPECT_EQ(boundary_diff_net(edge_pin_fixture(5)), 0);
}

TEST(Boundary, FilterExamples) {
  Cell c;
  c.name = "W";
  c.width = 1100;
  c.height = 1000;
  const Testcell tc = make_type_aa(c);
  Violation on_edge;
  on_edge.location = {1100, 400, 1100, 500};
  Violation middle;
  middle.location = {500, 400, 560, 450};
  Violation touching;
  touching.location = {1050, 400, 1100, 450};
  Violation near;
  near.location = {1040, 400, 1099, 450};
  const auto wide = filter_boundary({on_edge, middle}, tc, 220);
  EXPECT_TRUE(wide[0].at_boundary);
  EXPECT_FALSE(wide[1].at_boundary);
  const auto zero = filter_boundary({touching, near}, tc, 0);
  EXPECT_TRUE(zero[0].at_boundary);
  EXPECT_FALSE(zero[1].at_boundary);
}

TEST(Boundary, Attribution) {
  Cell a;
  a.name = "A";
  a.width = 200;
  a.height = 1000;
  Cell b = a;
  b.name = "B";
  const Testcell tc = make_type_ab(a, b);
  Violation v;
  v.location = {190, 100, 210, 200};
  std::vector<Violation> vs{v};
  attribute(vs, tc);
  EXPECT_EQ(vs[0].masters, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(vs[0].shared);
}

TEST(DoublePatterning, TriangleAndSquare) {
  const TechRules deck = one_layer_deck(50, 50, 90);
  const Layout k3 = layout_of({wire("a", {0, 0, 50, 50}), wire("b", {120, 0, 170, 50}), wire("c", {60, 120, 110, 170})});
  const auto odd = check_dp(k3, deck, DpOption::Recolor);
  EXPECT_EQ(count_rule(odd, Rule::DpOddCycle), 1);
  EXPECT_EQ(odd.size(), 1u);
  const Layout c4 = layout_of({wire("a", {0, 0, 50, 50}), wire("b", {120, 0, 170, 50}), wire("c", {120, 120, 170, 170}),
                               wire("d", {0, 120, 50, 170})});
  EXPECT_TRUE(check_dp(c4, deck, DpOption::Recolor).empty());
  EXPECT_TRUE(check_dp(k3, deck, DpOption::Off).empty());
}

TEST(DoublePatterning, SameMaskBridging) {
  const TechRules deck = one_layer_deck(50, 50, 90);
  const Layout same = layout_of({wire("a", {0, 0, 500, 50}, 1), wire("b", {0, 120, 500, 170}, 1)});
  EXPECT_GE(count_rule(check_dp(same, deck, DpOption::Precolored), Rule::DpPrecolorConflict), 1);
  const Layout split = layout_of({wire("a", {0, 0, 500, 50}, 1), wire("b", {0, 120, 500, 170}, 2)});
  EXPECT_TRUE(check_dp(split, deck, DpOption::Precolored).empty());
}

TEST(DoublePatterning, UncoloredFallsBackToRecolor) {
  const TechRules deck = one_layer_deck(50, 50, 90);
  const Layout k3 = layout_of({wire("a", {0, 0, 50, 50}), wire("b", {120, 0, 170, 50}), wire("c", {60, 120, 110, 170})});
  std::vector<std::string> diagnostics;
  EXPECT_EQ(count_rule(check_dp(k3, deck, DpOption::Precolored, 0, &diagnostics), Rule::DpOddCycle), 1);
}

TEST(DoublePatterning, MatchesExhaustiveColouring) {
  const TechRules deck = one_layer_deck(50, 50, 120);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Coord> pos(0, 600), len(40, 160);
  int graphs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Shape> shapes;
    const int n = std::uniform_int_distribution<int>(3, 14)(rng);
    for (int i = 0; i < n; ++i) {
      const Coord x = pos(rng), y = pos(rng);
      shapes.push_back(wire("n" + std::to_string(i), {x, y, x + len(rng), y + 50}));
    }
    const Layout l = layout_of(shapes);
    const ConflictGraph g = build_conflict_graph(l, deck, 0);
    ASSERT_LE(g.adj.size(), 15u);
    int odd = 0;
    for (const auto& comp : components(g)) {
      const bool bipartite = brute_force_bipartite(g, comp);
      odd += !bipartite;
      EXPECT_EQ(find_odd_cycle(g, comp.front()).has_value(), !bipartite);
    }
    EXPECT_EQ(count_rule(check_dp(l, deck, DpOption::Recolor), Rule::DpOddCycle), odd) << "trial " << trial;
    graphs += odd > 0;
  }
  EXPECT_GT(graphs, 0);
}

TEST(Inflation, Arithmetic) {
  TechRules deck = one_layer_deck(64, 50);
  EXPECT_EQ(inflate_rules(deck, 1.25).layers[0].min_spacing, 80);
  EXPECT_EQ(inflate_rules(deck, 1.0), deck);
  EXPECT_EQ(inflate_rules(one_layer_deck(50, 50), 1.01).layers[0].min_spacing, 51);
  EXPECT_THROW(inflate_rules(deck, 0.9), std::invalid_argument);
}

TEST(Inflation, NestedOnRandomGeometry) {
  const TechRules deck = one_layer_deck();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<Coord> pos(0, 1000), len(50, 300);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Shape> shapes;
    for (int i = 0; i < 20; ++i) {
      const Coord x = pos(rng), y = pos(rng);
      shapes.push_back(wire("n" + std::to_string(i % 7), {x, y, x + len(rng), y + 50}));
    }
    const Layout l = layout_of(shapes);
    const auto base = spacing_set(check_geometry(l, deck));
    const auto mid = spacing_set(check_geometry(l, inflate_rules(deck, 1.25)));
    const auto high = spacing_set(check_geometry(l, inflate_rules(deck, 1.5)));
    EXPECT_TRUE(std::ranges::includes(mid, base)) << trial;
    EXPECT_TRUE(std::ranges::includes(high, mid)) << trial;
  }
}

TEST(Drc, ToyRunIsDeterministicAndShortFree) {
  const auto lib = abutcheck::testing::toy_library();
  for (const auto& tc : enumerate_library(lib.cells, Mode::All)) {
    const RoutedDesign routed = route(tc, lib.cells, toy_tech());
    const DrcResult a = run_drc(routed, tc, toy_tech(), DrcOptions{});
    EXPECT_EQ(count_rule(a.violations, Rule::Short), 0) << tc.name;
    EXPECT_EQ(count_rule(a.violations, Rule::Open), 0) << tc.name;
    EXPECT_TRUE(std::ranges::is_sorted(a.violations, violation_less));
    EXPECT_EQ(a.violations, run_drc(routed, tc, toy_tech(), DrcOptions{}).violations);
    DrcOptions inflated;
    inflated.rule_inflation = 1.5;
    EXPECT_TRUE(std::ranges::includes(spacing_set(run_drc(routed, tc, toy_tech(), inflated).violations),
                                      spacing_set(a.violations)))
        << tc.name;
  }
}
