#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abutcheck/errors.hpp"
#include "abutcheck/geometry.hpp"

namespace abutcheck {

enum class PinKind { Signal, Power, Ground };
enum class LayerKind { Routing, Cut };
enum class Direction { Horizontal, Vertical, None };

std::string_view to_string(PinKind k);
std::string_view to_string(LayerKind k);
std::string_view to_string(Direction d);

/// A rectangle on a named layer. mask is 0 for uncolored, 1 or 2 for a
/// pre-assigned double-patterning mask.
struct LayerRect {
  std::string layer;
  Rect rect;
  int mask = 0;
  bool operator==(const LayerRect&) const = default;
};

struct Pin {
  std::string name;
  PinKind kind = PinKind::Signal;
  std::vector<LayerRect> shapes;
  bool operator==(const Pin&) const = default;
};

struct Cell {
  std::string name;
  Coord width = 0;
  Coord height = 0;
  int height_rows = 1;
  std::vector<Pin> pins;
  std::vector<LayerRect> obstructions;

  Rect bbox() const { return {0, 0, width, height}; }
  Coord row_height() const { return height / height_rows; }
  bool operator==(const Cell&) const = default;
};

struct LayerRule {
  std::string name;
  LayerKind kind = LayerKind::Routing;
  Direction direction = Direction::None;
  Coord pitch = 0;
  Coord min_width = 0;  // cut size on CUT layers
  Coord min_spacing = 0;
  Coord same_net_spacing = 0;
  Coord dp_spacing = 0;  // 0 disables double patterning on the layer
  Coord via_enclosure = 0;
  Coord min_enclosed_width = 0;
  bool operator==(const LayerRule&) const = default;
};

struct TechRules {
  std::vector<LayerRule> layers;
  Coord site_row_height = 0;
  int units_per_micron = 1000;

  std::optional<int> find_layer(std::string_view name) const;
  /// Throws std::invalid_argument for unknown names.
  int layer_index(std::string_view name) const;
  bool operator==(const TechRules&) const = default;
};

struct Diagnostic {
  enum class Severity { Warning, RejectedCell };
  Severity severity = Severity::Warning;
  int line = 0;
  std::string subject;  // cell or layer name
  std::string message;
};

struct CellParseOptions {
  int units_per_micron = 1000;
  /// 0 infers the row height as the smallest cell height in the file.
  Coord site_row_height = 0;
  /// Name prefixes used to classify pins that carry no USE clause.
  std::vector<std::string> power_patterns{"VDD"};
  std::vector<std::string> ground_patterns{"VSS"};
};

struct CellLibrary {
  std::vector<Cell> cells;
  std::vector<Diagnostic> diagnostics;
};

/// Reads the LEF subset (MACRO/SIZE/PIN/USE/PORT/LAYER/MASK/RECT/OBS).
/// Syntax errors throw ParseError; cells that violate geometric invariants
/// are dropped with a RejectedCell diagnostic.
CellLibrary parse_cells(std::string_view text, const CellParseOptions& options = {});

/// Writes cells back in the same subset; parse_cells(emit_cells(c)) == c.
std::string emit_cells(std::span<const Cell> cells, int units_per_micron = 1000);

/// Line-based rules deck. Structural errors throw ParseError; soft issues
/// (pitch tighter than width + spacing, non-alternating stack) are appended
/// to warnings when given.
TechRules parse_tech_rules(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

/// Canonical text form of a deck, used for hashing and round trips.
std::string emit_tech_rules(const TechRules& tech);

struct ProfileEntry {
  Coord width = 0;
  Coord height = 0;
  int height_rows = 1;
  std::vector<std::string> pin_names;
};

struct LibraryProfile {
  std::map<std::string, ProfileEntry> entries;
  Coord min_width = 0;
  /// floor(width / min_width) → fraction of cells; fractions sum to 1.
  std::map<long long, double> width_histogram;
};

/// Throws std::invalid_argument on an empty library.
LibraryProfile profile_library(std::span<const Cell> cells);

}  // namespace abutcheck
