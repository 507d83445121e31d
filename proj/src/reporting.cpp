#include "abutcheck/reporting.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "abutcheck/random.hpp"

namespace abutcheck {

namespace {

constexpr std::size_t kNameColumn = 19;
constexpr std::size_t kTypeIndent = 52;

LayerKind kind_of(const TechRules& deck, int layer) {
  if (layer < 0 || layer >= static_cast<int>(deck.layers.size())) return LayerKind::Routing;
  return deck.layers[layer].kind;
}

std::string layer_name(const TechRules& deck, int layer) {
  if (layer < 0 || layer >= static_cast<int>(deck.layers.size())) return "";
  return deck.layers[layer].name;
}

std::string row(const std::string& name, int count) {
  std::string out = name;
  out.append(name.size() < kNameColumn ? kNameColumn - name.size() : 1, ' ');
  return out + std::to_string(count) + "\n";
}

}  // namespace

std::vector<CellVerdict> cell_verdicts(std::span<const TestcellReport> reports, std::span<const std::string> masters) {
  std::map<std::string, CellVerdict> by_cell;
  for (const auto& m : masters) by_cell[m].cell = m;
  for (const auto& r : reports) {
    for (const auto& v : r.drc.violations) {
      if (!v.at_boundary) continue;
      const std::string type = display_name(v.rule, kind_of(r.drc.deck, v.layer));
      for (const auto& m : v.masters) {
        auto it = by_cell.find(m);
        if (it == by_cell.end()) continue;
        ++it->second.drc_count;
        it->second.rule_types.insert(type);
      }
    }
  }
  std::vector<CellVerdict> out;
  for (auto& [name, verdict] : by_cell) {
    verdict.problematic = verdict.drc_count > 0;
    out.push_back(std::move(verdict));
  }
  return out;
}

std::string drc_summary(std::span<const CellVerdict> verdicts) {
  std::vector<const CellVerdict*> clean, dirty;
  for (const auto& v : verdicts) (v.problematic ? dirty : clean).push_back(&v);
  auto by_name = [](const CellVerdict* a, const CellVerdict* b) { return a->cell < b->cell; };
  std::ranges::sort(clean, by_name);
  std::ranges::sort(dirty, by_name);

  std::string out;
  out += "=====\n";
  out += "SCRIPT-Info: Printing DRC Summary ...\n";
  out += "=====\n";
  out += "##### " + std::to_string(clean.size()) + " cells without DRC errors #####\n";
  out += "-----\n";
  out += "Cell                DRC count  Master Cells with DRC                DRC Types\n";
  out += "-----\n";
  for (const auto* v : clean) out += row(v->cell, v->drc_count);
  out += "##### " + std::to_string(dirty.size()) + " cells with DRC errors #####\n";
  for (const auto* v : dirty) {
    out += row(v->cell, v->drc_count);
    out.append(kTypeIndent, ' ');
    bool first = true;
    for (const auto& t : v->rule_types) {
      if (!first) out += ' ';
      out += "{" + t + "}";
      first = false;
    }
    out += "\n";
  }
  return out;
}

std::string content_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string dedup_key(const std::string& testcell, const Violation& v, const TechRules& deck) {
  std::ostringstream key;
  key << testcell << '|' << to_string(v.rule) << '|' << layer_name(deck, v.layer) << '|' << v.location.x_lo << ','
      << v.location.y_lo << ',' << v.location.x_hi << ',' << v.location.y_hi;
  for (const auto& n : v.nets) key << '|' << n;
  return key.str();
}

namespace {

nlohmann::json manifest_object(const RunManifest& manifest) {
  return {
      {"version", manifest.version},
      {"seed", manifest.seed},
      {"mode", manifest.mode},
      {"min_layer", manifest.min_layer},
      {"max_layer", manifest.max_layer},
      {"dpt", manifest.dpt},
      {"rule_inflation", manifest.rule_inflation},
      {"boundary_margin", manifest.boundary_margin},
      {"pin_pairing", manifest.pin_pairing},
      {"net_degree", manifest.net_degree},
      {"die_margin", manifest.die_margin},
      {"straps", manifest.straps},
      {"cell_file", manifest.cell_file},
      {"tech_file", manifest.tech_file},
      {"cell_hash", manifest.cell_hash},
      {"deck_hash", manifest.deck_hash},
      {"testcells", manifest.testcells},
  };
}

}  // namespace

std::string manifest_json(const RunManifest& manifest) { return manifest_object(manifest).dump(2) + "\n"; }

std::string json_report(const RunManifest& manifest, std::span<const TestcellReport> reports,
                        std::span<const CellVerdict> verdicts) {
  using nlohmann::json;
  json doc;
  doc["manifest"] = manifest_object(manifest);

  std::size_t total = 0, boundary = 0;
  json testcells = json::array();
  for (const auto& r : reports) {
    json violations = json::array();
    for (const auto& v : r.drc.violations) {
      violations.push_back({
          {"rule", to_string(v.rule)},
          {"type", display_name(v.rule, kind_of(r.drc.deck, v.layer))},
          {"layer", layer_name(r.drc.deck, v.layer)},
          {"location", {v.location.x_lo, v.location.y_lo, v.location.x_hi, v.location.y_hi}},
          {"nets", v.nets},
          {"at_boundary", v.at_boundary},
          {"masters", v.masters},
          {"shared", v.shared},
          {"key", dedup_key(r.drc.testcell, v, r.drc.deck)},
      });
      ++total;
      if (v.at_boundary) ++boundary;
    }
    json unrouted = json::array();
    for (const auto& u : r.unrouted) unrouted.push_back({{"net", u.net}, {"reason", to_string(u.reason)}});
    json tc = {
        {"name", r.drc.testcell},
        {"violations", std::move(violations)},
        {"unrouted", std::move(unrouted)},
        {"warnings", r.warnings},
    };
    if (!r.error.empty()) tc["error"] = r.error;
    testcells.push_back(std::move(tc));
  }
  doc["testcells"] = std::move(testcells);

  json cells = json::array();
  std::size_t problematic = 0;
  for (const auto& v : verdicts) {
    cells.push_back({
        {"cell", v.cell},
        {"drc_count", v.drc_count},
        {"rule_types", v.rule_types},
        {"problematic", v.problematic},
    });
    if (v.problematic) ++problematic;
  }
  doc["cells"] = std::move(cells);
  doc["totals"] = {
      {"violations", total},
      {"boundary_violations", boundary},
      {"problematic_cells", problematic},
      {"testcells", reports.size()},
  };
  return doc.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string width_histogram_csv(const LibraryProfile& profile) {
  if (profile.width_histogram.empty()) throw std::invalid_argument("empty width histogram");
  std::string out = "bucket,fraction\n";
  for (const auto& [bucket, fraction] : profile.width_histogram) {
    out += std::to_string(bucket) + "," + format_double(fraction) + "\n";
  }
  return out;
}

std::string profile_listing(const LibraryProfile& profile, int units_per_micron) {
  std::string out;
  const double upm = units_per_micron;
  for (const auto& [name, e] : profile.entries) {
    out += name + " width=" + format_double(e.width / upm) + " height=" + format_double(e.height / upm) +
           " rows=" + std::to_string(e.height_rows) + " pins=";
    for (std::size_t i = 0; i < e.pin_names.size(); ++i) out += (i ? "," : "") + e.pin_names[i];
    out += "\n";
  }
  return out;
}

}  // namespace abutcheck
