#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sciforge/raster.hpp"

namespace sciforge::annotate {

using raster::Box;
using raster::LabelMap;

// Everything recorded about one generated figure.
struct ForgeryRecord {
  std::string figure_id;
  std::string modality;     // e.g. "duplication", "cleaning", "pristine"
  std::string submodality;  // e.g. "copy_move_flip", "brute_force"
  std::vector<std::string> source_refs;
  std::vector<std::pair<std::string, std::string>> method_args;
  std::vector<Box> panel_locations;  // compound figures only
  int verbosity = 0;                 // 0 = simple figure
  uint64_t seed = 0;
  std::string split;  // train | test
  std::vector<std::string> gt_files;  // relative paths; empty iff pristine

  bool tampered() const { return !gt_files.empty(); }
};

// Throws std::invalid_argument when the record violates its invariants:
// source_refs nonempty, gt_files empty exactly for pristine records, and
// panel_locations present exactly when verbosity >= 1.
void validate(const ForgeryRecord& rec, bool pristine);

struct ManifestEntry {
  std::string figure_id;
  std::string split;       // train | test
  std::string complexity;  // simple | compound
  std::string taxonomy;    // pristine | duplication | cleaning | retouching
  std::string submodality;
  int verbosity = 0;
  std::vector<std::string> paths;  // relative to the dataset root
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// 16-bit grayscale PNG, sample value = region ID; lossless round trip.
void write_ground_truth(const LabelMap& gt, const std::string& path);
LabelMap read_ground_truth(const std::string& path);

// Canonical JSON (sorted keys, two-space indent, trailing newline). The
// record is validated before anything is written.
void write_metadata(const ForgeryRecord& rec, const std::string& path,
                    bool pristine);
ForgeryRecord read_metadata(const std::string& path);

std::string metadata_to_json(const ForgeryRecord& rec);
ForgeryRecord metadata_from_json(const std::string& text);

// Manifest lives at <root>/manifest.json. Reading validates figure_id
// uniqueness and (unless check_paths is false) that every path exists.
void write_manifest(const DatasetManifest& manifest, const std::string& root);
DatasetManifest read_manifest(const std::string& root,
                              bool check_paths = true);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

}  // namespace sciforge::annotate
