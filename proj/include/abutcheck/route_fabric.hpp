#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abutcheck/abutment.hpp"
#include "abutcheck/cell_library.hpp"

namespace abutcheck {

struct Terminal {
  std::string instance;
  std::string pin;
  auto operator<=>(const Terminal&) const = default;
};

struct Net {
  std::string name;
  PinKind kind = PinKind::Signal;
  std::vector<Terminal> terminals;
  bool operator==(const Net&) const = default;
};

enum class PinPairing { Random, Aligned };
std::string_view to_string(PinPairing p);
/// Accepts "random" and "aligned".
PinPairing pin_pairing_from_string(std::string_view s);

/// Power and ground pins form the nets VDD and VSS. Signal pins are
/// shuffled with the "pins/<testcell>" stream and cut into nets of
/// net_degree terminals; the last net absorbs a short remainder. Aligned
/// pairing instead joins every copy of the same (master, pin).
/// Throws std::invalid_argument if an instance names an unknown cell.
std::vector<Net> assign_pin_nets(const Testcell& tc, std::span<const Cell> cells, std::uint64_t seed,
                                 int net_degree = 2, PinPairing pairing = PinPairing::Random,
                                 std::vector<std::string>* warnings = nullptr);

/// Library geometry of one placed instance, in die coordinates.
struct PlacedShape {
  int layer = 0;  // index into TechRules::layers
  Rect rect;
  int mask = 0;
  int instance = 0;  // index into Testcell::instances
  std::string pin;   // empty for obstructions
  std::string net;
  bool operator==(const PlacedShape&) const = default;
};

/// Pins on no net get the pseudo-net "<inst>/<pin>", obstructions
/// "<inst>/_OBS_". Shapes on layers the deck does not know are skipped.
std::vector<PlacedShape> place_cell_shapes(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech,
                                           std::span<const Net> nets, std::vector<std::string>* warnings = nullptr);

struct Wire {
  std::string net;
  int layer = 0;
  Rect rect;
  bool operator==(const Wire&) const = default;
};

struct Via {
  std::string net;
  int cut_layer = 0;
  Point center;
  bool operator==(const Via&) const = default;
};

/// Rails and straps share this shape: a pre-route owned by VDD or VSS.
struct Strap {
  std::string net;
  int layer = 0;
  Rect rect;
  bool operator==(const Strap&) const = default;
};

/// Cut square plus one landing pad on each adjacent metal layer, as
/// (layer, rect). Pads reach c/2 + enclosure along the metal's preferred
/// direction and max(c, width)/2 across it.
std::vector<std::pair<int, Rect>> via_geometry(const TechRules& tech, int cut_layer, Point center);

/// Routing lattice over a window of routing layers. x tracks come from the
/// first vertical layer of the window and y tracks from the first
/// horizontal one, at pitch/2 + i*pitch. Wires follow the preferred
/// direction of their layer.
class RouteGrid {
 public:
  static constexpr int kFree = -1;
  static constexpr int kBlocked = -2;

  /// Throws std::invalid_argument for unknown layers, an empty or
  /// single-direction window, or a window with max below min.
  RouteGrid(const TechRules& tech, const Rect& die, std::string_view min_layer, std::string_view max_layer);

  const TechRules& tech() const { return *tech_; }
  const Rect& die() const { return die_; }
  int layers() const { return static_cast<int>(window_.size()); }
  int tech_layer(int l) const { return window_[l]; }
  /// Window index of a tech layer, or -1.
  int window_index(int tech_layer) const;
  Direction direction(int l) const;
  const std::vector<Coord>& xs() const { return xs_; }
  const std::vector<Coord>& ys() const { return ys_; }
  int nodes() const { return static_cast<int>(fixed_.size()); }
  int node(int l, int ix, int iy) const { return (l * static_cast<int>(ys_.size()) + iy) * static_cast<int>(xs_.size()) + ix; }
  int layer_of(int n) const { return n / static_cast<int>(xs_.size() * ys_.size()); }
  int ix_of(int n) const { return n % static_cast<int>(xs_.size()); }
  int iy_of(int n) const { return (n / static_cast<int>(xs_.size())) % static_cast<int>(ys_.size()); }
  Point point(int n) const { return {xs_[ix_of(n)], ys_[iy_of(n)]}; }
  /// Region a wire through the node may occupy: half a pitch each way
  /// along the layer, the layer's width across it.
  Rect footprint(int n) const;

  /// Fixed owner: kFree, kBlocked, or a net id (reserved for that net).
  int fixed(int n) const { return fixed_[n]; }
  /// Router owner: kFree or a net id.
  int used(int n) const { return used_[n]; }
  bool usable_by(int n, int net) const {
    return (fixed_[n] == kFree || fixed_[n] == net) && (used_[n] == kFree || used_[n] == net);
  }

  /// Marks nodes on `tech_layer` whose footprint touches `r` grown by
  /// `clearance`. owner kBlocked shuts the nodes for everyone; a net id
  /// reserves them. Nodes already reserved for another net become blocked.
  void block(int tech_layer, const Rect& r, Coord clearance, int owner = kBlocked);
  void set_used(int n, int net) { used_[n] = net; }

  /// Planar neighbours along the layer's direction, then the nodes
  /// directly below and above.
  std::vector<int> neighbours(int n) const;

 private:
  const TechRules* tech_;
  Rect die_;
  std::vector<int> window_;
  Coord x_pitch_ = 0, y_pitch_ = 0;
  std::vector<Coord> xs_, ys_;
  std::vector<int> fixed_, used_;
};

/// One rail per row boundary: VSS on even boundaries, VDD on odd,
/// on the lowest window layer, centred on the boundary and spanning the
/// die. Width is twice the tallest supply-pin band (2*min_width if the
/// testcell has no supply pins, with a warning).
std::vector<Strap> preroute_power(const Testcell& tc, std::span<const Cell> cells, const RouteGrid& grid,
                                  std::vector<std::string>* warnings = nullptr);

/// Constants of the random strap formula: width = u/width_divisor um,
/// step = u'/step_divisor um, u and u' uniform in [0, range).
struct StrapDensity {
  int range = 100;
  int width_divisor = 500;
  int step_divisor = 50;
  /// Tracks that must stay open between neighbouring straps.
  int min_free_tracks = 4;
};

/// Per window layer, one (u, u') draw from the "straps/<testcell>" stream.
/// Width 0 or below the layer minimum skips the layer. A step that would
/// leave fewer than min_free_tracks open tracks between straps is rounded
/// up to the next formula value that does. Straps alternate VDD/VSS from
/// the die's low edge and are dropped when they leave the die or come
/// within spacing of `fixed` geometry.
std::vector<Strap> generate_straps(const RouteGrid& grid, std::uint64_t seed, std::string_view testcell,
                                   std::span<const Strap> fixed, std::span<const PlacedShape> cell_shapes,
                                   const StrapDensity& density = {}, std::vector<std::string>* warnings = nullptr);

struct RouteOptions {
  std::uint64_t seed = 1;
  std::string min_layer = "M2";
  std::string max_layer = "M3";
  int via_cost = 5;
  int max_ripup_iterations = 20;
  bool straps = true;
  StrapDensity strap_density;
  int net_degree = 2;
  PinPairing pin_pairing = PinPairing::Random;
};

enum class UnroutedReason { PinBlocked, NoPath };
std::string_view to_string(UnroutedReason r);

struct Unrouted {
  std::string net;
  UnroutedReason reason = UnroutedReason::NoPath;
  bool operator==(const Unrouted&) const = default;
};

struct RoutedDesign {
  std::string testcell;
  Rect die;
  std::vector<Net> nets;
  std::vector<PlacedShape> cell_shapes;
  std::vector<Wire> wires;
  std::vector<Via> vias;
  std::vector<Strap> rails;
  std::vector<Strap> straps;
  std::vector<Unrouted> unrouted;
  /// Unresolved opens after each rip-up pass, starting with the first pass.
  std::vector<int> open_history;
  std::vector<std::string> warnings;
  bool operator==(const RoutedDesign&) const = default;
};

/// Full per-testcell flow: pin nets, rails, straps, then maze routing of
/// the signal nets with rip-up and reroute. No two nets ever share a grid
/// node; a net either connects completely or is listed in `unrouted` with
/// no wires left behind.
RoutedDesign route(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech,
                   const RouteOptions& options = {});

/// Routes given nets on a prepared grid (rails, straps and cell geometry
/// already blocked). Exposed for fixtures that build their own nets.
RoutedDesign route_nets(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech,
                        std::vector<Net> nets, const RouteOptions& options, std::span<const Strap> rails,
                        std::span<const Strap> straps);

/// Inspection dump: one `NEWNET <net> <layer> ( x1 y1 ) ( x2 y2 )` line per
/// wire, via cut, rail and strap. Not a stable format.
std::string dump_routes(const RoutedDesign& design, const TechRules& tech);

}  // namespace abutcheck
