#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abutcheck/cell_library.hpp"
#include "abutcheck/geometry.hpp"

namespace abutcheck {

/// Placement transforms. The four form the Klein group: every element is
/// its own inverse and MX∘MY = R180.
enum class Orientation : std::uint8_t { R0, R180, MX, MY };

inline constexpr Orientation kAllOrientations[] = {Orientation::R0, Orientation::R180, Orientation::MX,
                                                   Orientation::MY};

Orientation compose(Orientation a, Orientation b);
std::string_view to_string(Orientation o);
/// DEF codes: R0=N, R180=S, MX=FS, MY=FN.
std::string_view to_def(Orientation o);
/// Throws std::invalid_argument on anything but N, S, FS, FN.
Orientation orientation_from_def(std::string_view code);

/// Maps a rect given in cell coordinates to the placed cell's local frame
/// (origin at the placed bbox's lower-left).
Rect apply_orientation(const Rect& r, Orientation o, Coord cell_w, Coord cell_h);

/// Orientations a single-height cell may take in a row of the given parity.
inline bool legal_in_row(Orientation o, int row) {
  const bool even = row % 2 == 0;
  return even ? (o == Orientation::R0 || o == Orientation::MY) : (o == Orientation::MX || o == Orientation::R180);
}

struct InstancePlacement {
  std::string instance_name;
  std::string cell_name;
  Point origin;
  Orientation orientation = Orientation::R0;
  int row_index = 0;
  Coord width = 0;
  Coord height = 0;
  int height_rows = 1;

  Rect bbox() const { return {origin.x, origin.y, origin.x + width, origin.y + height}; }
  bool operator==(const InstancePlacement&) const = default;
};

enum class TestcellKind { TypeAA, TypeAB, TypeMulti };
std::string_view to_string(TestcellKind k);

struct Testcell {
  std::string name;
  TestcellKind kind = TestcellKind::TypeAA;
  std::vector<InstancePlacement> instances;
  Rect die;
  int rows = 1;
  Coord row_height = 0;
  /// Set in all_combo_in_one_cell_only mode: the testcell is realised
  /// under the combined top design instead of as a design of its own.
  bool in_combined_top = false;

  bool operator==(const Testcell&) const = default;
};

/// Four copies in one row, N FN FN N. Multi-height cells are accepted and
/// span height_rows rows.
Testcell make_type_aa(const Cell& cell);

/// B A B A B in one row with orientations R0 R0 MY MY R0.
/// Throws std::invalid_argument unless both cells are single-height.
Testcell make_type_ab(const Cell& a, const Cell& b);

/// Column pattern [B-stack, A, B-stack, A, B-stack] where each stack is
/// k = multi.height_rows single-height B cells; 2 + 3k instances.
/// Throws std::invalid_argument if k < 2 or single is not single-height.
Testcell make_multi(const Cell& multi, const Cell& single);

enum class Mode { SingleCellOnly, CellByCellOnly, AllComboInOneCellOnly, All };
std::string_view to_string(Mode m);
/// Accepts the verification mode names (single_cell_only, ...).
Mode mode_from_string(std::string_view s);

/// Deterministic order: type A-A by cell name, then type A-B by (A, B) with
/// A < B, then single/multiple-height pairs by (multi, single).
/// Throws std::invalid_argument on an empty library.
std::vector<Testcell> enumerate_library(std::span<const Cell> cells, Mode mode);

enum class CountMethod { Conventional, Synopsys, Ours };
/// Instances needed for full side-by-side coverage of n single-height cells.
std::int64_t predicted_cell_count(std::int64_t n, CountMethod method);

/// One side of an abutment: the cell, which row of it (0 for
/// single-height cells) and its orientation.
struct OrientedCell {
  std::string cell;
  int slice = 0;
  Orientation orientation = Orientation::R0;
  auto operator<=>(const OrientedCell&) const = default;
};

struct AdjacencyClass {
  OrientedCell left;
  OrientedCell right;
  auto operator<=>(const AdjacencyClass&) const = default;
};

/// ((L,oL),(R,oR)) ↦ ((R, MY∘oR), (L, MY∘oL)).
AdjacencyClass mirror(const AdjacencyClass& pair);
/// Lexicographically smaller of a pair and its mirror image.
AdjacencyClass canonicalize(const AdjacencyClass& pair);

/// Every mirror-distinct ordered abutment the library admits (single-height
/// pairs, multi-height self pairs per row, single/multi pairs per row).
std::set<AdjacencyClass> coverage_classes(std::span<const Cell> cells);

/// Canonical classes of the horizontal abutments actually present in a
/// testcell, per row.
std::set<AdjacencyClass> realized_classes(const Testcell& tc);

}  // namespace abutcheck
