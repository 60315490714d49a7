#pragma once

// Dataset manifests: CSV with header `path,label,bt_distance_cm,dpi`, or a
// JSON array of objects with the same keys. Relative paths resolve against
// the manifest's directory.

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "bpa/harness/csv.hpp"

namespace bpa::harness {

enum class PatternClass { kImpact = 0, kGunshot = 1 };

inline const char* to_string(PatternClass c) { return c == PatternClass::kGunshot ? "gunshot" : "impact"; }

/// Accepts "gunshot"/"gun"/"1" and "impact"/"0".
inline PatternClass parse_class(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "gunshot" || s == "gun" || s == "1") return PatternClass::kGunshot;
  if (s == "impact" || s == "0") return PatternClass::kImpact;
  throw InvalidInput("label must be 'gunshot' or 'impact', got '" + s + "'");
}

struct ManifestRecord {
  std::filesystem::path path;
  PatternClass label = PatternClass::kImpact;
  double bt_distance_cm = 0.0;
  double dpi = 0.0;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;

  void validate() const {
    std::set<std::filesystem::path> seen;
    for (const auto& r : records) {
      if (!(r.dpi > 0.0)) throw InvalidInput("manifest: dpi must be positive for " + r.path.string());
      if (!seen.insert(r.path.lexically_normal()).second) {
        throw InvalidInput("manifest: duplicate path " + r.path.string());
      }
    }
  }
};

inline std::filesystem::path resolve_against(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

inline DatasetManifest parse_manifest_csv(std::string_view text, const std::filesystem::path& base) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw InvalidInput("manifest: empty file");
  const CsvRow expected{"path", "label", "bt_distance_cm", "dpi"};
  if (rows.front() != expected) throw InvalidInput("manifest: header must be path,label,bt_distance_cm,dpi");
  DatasetManifest m;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw InvalidInput("manifest: line " + std::to_string(i + 1) + " needs 4 fields");
    ManifestRecord rec;
    rec.path = resolve_against(base, r[0]);
    rec.label = parse_class(r[1]);
    rec.bt_distance_cm = parse_number(r[2], "bt_distance_cm");
    rec.dpi = parse_number(r[3], "dpi");
    m.records.push_back(std::move(rec));
  }
  m.validate();
  return m;
}

inline DatasetManifest parse_manifest_json(const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_array()) throw InvalidInput("manifest: JSON manifest must be an array");
  DatasetManifest m;
  for (const auto& e : j) {
    ManifestRecord rec;
    rec.path = resolve_against(base, e.at("path").get<std::string>());
    const auto& label = e.at("label");
    rec.label = parse_class(label.is_number() ? std::to_string(label.get<int>()) : label.get<std::string>());
    rec.bt_distance_cm = e.at("bt_distance_cm").get<double>();
    rec.dpi = e.at("dpi").get<double>();
    m.records.push_back(std::move(rec));
  }
  m.validate();
  return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto text = read_text(path);
  const auto base = path.parent_path();
  if (path.extension() == ".json") return parse_manifest_json(nlohmann::json::parse(text), base);
  return parse_manifest_csv(text, base);
}

/// CSV text with paths written relative to `base` when possible.
inline std::string manifest_csv(const DatasetManifest& m, const std::filesystem::path& base) {
  std::vector<CsvRow> rows;
  for (const auto& r : m.records) {
    auto p = r.path.lexically_relative(base);
    if (p.empty()) p = r.path;
    rows.push_back({p.generic_string(), to_string(r.label), format_number(r.bt_distance_cm), format_number(r.dpi)});
  }
  return to_csv_text({"path", "label", "bt_distance_cm", "dpi"}, rows);
}

}  // namespace bpa::harness
