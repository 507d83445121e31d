#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abutcheck/route_fabric.hpp"

namespace abutcheck {

enum class Rule {
  DiffNetSpacing,
  SameNetSpacing,
  MinWidth,
  ViaEnclosure,
  MinEnclosedWidth,
  Short,
  Open,
  DpPrecolorConflict,
  DpOddCycle,
};

/// Upper-case identifier, e.g. DIFF_NET_SPACING.
std::string_view to_string(Rule r);
/// Report vocabulary, e.g. "Diff net spacing" or, on a cut layer,
/// "Diff net via-cut spacing".
std::string display_name(Rule r, LayerKind kind = LayerKind::Routing);

struct Violation {
  Rule rule = Rule::DiffNetSpacing;
  int layer = -1;  // -1 for OPEN, which spans layers
  Rect location;
  std::vector<std::string> nets;  // sorted
  bool at_boundary = false;
  std::vector<std::string> masters;  // library cells whose placed bbox touches location
  bool shared = false;               // more than one master
  bool operator==(const Violation&) const = default;
};

/// Canonical order: layer, location, rule, nets.
bool violation_less(const Violation& a, const Violation& b);

enum class ShapeKind { Pin, Obstruction, Wire, ViaCut, ViaPad, Rail, Strap };

struct Shape {
  int layer = 0;
  Rect rect;
  std::string net;
  ShapeKind kind = ShapeKind::Wire;
  int mask = 0;
  int pin_group = -1;  // shapes of one placed pin are electrically one
  int instance = -1;   // placed instance for cell geometry
};

struct Layout {
  Rect die;
  std::vector<Shape> shapes;
  /// Nets whose connectivity is checked (signal nets of two or more pins).
  std::vector<std::string> signal_nets;
};

/// Flattens cell geometry, rails, straps, wires and via cuts/pads. Via
/// geometry comes from `tech`, which should be the deck used for routing.
Layout build_layout(const RoutedDesign& routed, const TechRules& tech);

/// Spacing, width, enclosure, short and open checks. Pairs of pin or
/// obstruction shapes belonging to the same placed instance are not
/// checked against each other.
std::vector<Violation> check_geometry(const Layout& layout, const TechRules& tech);
std::vector<Violation> check_geometry(const RoutedDesign& routed, const TechRules& tech);

/// Clusters of touching shapes on one layer (any net) and the pairs closer
/// than the layer's dp_spacing.
struct ConflictGraph {
  int layer = 0;
  std::vector<Rect> bbox;               // per cluster
  std::vector<std::vector<int>> shapes;  // per cluster, indices into Layout::shapes
  std::vector<int> mask;                // 0 uncolored, 1/2, or -1 when a cluster mixes both masks
  std::vector<std::vector<int>> adj;    // sorted, symmetric, no self loops
};

ConflictGraph build_conflict_graph(const Layout& layout, const TechRules& tech, int layer);

/// Returns the clusters of an odd cycle in the component containing
/// `start`, or nothing when the component is bipartite.
std::optional<std::vector<int>> find_odd_cycle(const ConflictGraph& g, int start);

enum class DpOption { Precolored, Recolor, Off };
std::string_view to_string(DpOption o);
/// Accepts "precolored", "recolor" and "off".
DpOption dp_option_from_string(std::string_view s);

/// PRECOLORED: same-mask neighbours and clusters mixing both masks are
/// DP_PRECOLOR_CONFLICT; components holding uncolored clusters are checked
/// as in RECOLOR. RECOLOR: one DP_ODD_CYCLE per non-bipartite component,
/// located at its witness cycle. local_radius > 0 drops cycles whose bbox
/// is wider or taller than 2 * local_radius.
std::vector<Violation> check_dp(const Layout& layout, const TechRules& tech, DpOption option,
                                Coord local_radius = 0, std::vector<std::string>* diagnostics = nullptr);

/// Sets at_boundary when the location meets a vertical band of half-width
/// `margin` around an abutment x-edge or a die x-edge (closed intervals).
std::vector<Violation> filter_boundary(std::vector<Violation> violations, const Testcell& tc, Coord margin);

/// Scales min_spacing, min_width and min_enclosed_width by factor,
/// rounding up to whole units. Throws std::invalid_argument for factor < 1.
TechRules inflate_rules(const TechRules& tech, double factor);

/// Fills masters/shared from the placed instances touching each location.
void attribute(std::vector<Violation>& violations, const Testcell& tc);

struct DrcOptions {
  DpOption dp = DpOption::Precolored;
  double rule_inflation = 1.0;
  /// Negative selects 2 * min_spacing of the lowest routing layer in use.
  Coord boundary_margin = -1;
  std::string min_layer = "M2";
  Coord dp_local_radius = 0;
};

struct DrcResult {
  std::string testcell;
  std::vector<Violation> violations;
  TechRules deck;
  std::vector<std::string> diagnostics;
};

/// Layout from the routing deck, checks against the (possibly inflated)
/// checking deck, then boundary filtering and attribution.
DrcResult run_drc(const RoutedDesign& routed, const Testcell& tc, const TechRules& tech, const DrcOptions& options);

}  // namespace abutcheck
