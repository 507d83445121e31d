#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "abutcheck/cell_library.hpp"
#include "abutcheck/drc.hpp"

namespace abutcheck {

/// Everything the reports need about one testcell. A non-empty error means
/// the testcell failed to route or check and `drc` is incomplete.
struct TestcellReport {
  DrcResult drc;
  std::vector<Unrouted> unrouted;
  std::vector<std::string> warnings;
  std::string error;
};

struct CellVerdict {
  std::string cell;
  int drc_count = 0;
  std::set<std::string> rule_types;  // display names
  bool problematic = false;
  bool operator==(const CellVerdict&) const = default;
};

/// One verdict per master in `masters`, sorted by name. Each boundary
/// violation counts once for every master it touches.
std::vector<CellVerdict> cell_verdicts(std::span<const TestcellReport> reports, std::span<const std::string> masters);

/// Fixed-column text summary: clean cells, then cells with errors and
/// their brace-wrapped rule types.
std::string drc_summary(std::span<const CellVerdict> verdicts);

struct RunManifest {
  std::string version;
  std::uint64_t seed = 1;
  std::string mode;
  std::string min_layer;
  std::string max_layer;
  std::string dpt;
  double rule_inflation = 1.0;
  Coord boundary_margin = -1;
  std::string pin_pairing;
  int net_degree = 2;
  Coord die_margin = 0;
  bool straps = true;
  std::string cell_file;
  std::string tech_file;
  std::string cell_hash;  // FNV-1a 64 of the file bytes, hex
  std::string deck_hash;
  std::vector<std::string> testcells;
};

/// Hex FNV-1a 64 digest.
std::string content_hash(std::string_view bytes);

/// Sorted-key JSON of the manifest alone.
std::string manifest_json(const RunManifest& manifest);

/// Sorted-key JSON: manifest, per-testcell violations and unrouted nets,
/// per-cell verdicts and totals. Coordinates are database units.
std::string json_report(const RunManifest& manifest, std::span<const TestcellReport> reports,
                        std::span<const CellVerdict> verdicts);

/// Stable identity of a violation within a run.
std::string dedup_key(const std::string& testcell, const Violation& v, const TechRules& deck);

/// `bucket,fraction` rows in bucket order. Throws std::invalid_argument on
/// an empty histogram.
std::string width_histogram_csv(const LibraryProfile& profile);

/// One line per cell: name, width and height in microns, rows, pins.
std::string profile_listing(const LibraryProfile& profile, int units_per_micron = 1000);

/// Shortest decimal that reads back to the same double, with ".0" added
/// to integral values.
std::string format_double(double v);

}  // namespace abutcheck
