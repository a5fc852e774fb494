#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sciforge/annotate.hpp"
#include "sciforge/compound.hpp"
#include "sciforge/metrics.hpp"
#include "sciforge/raster.hpp"

namespace sciforge::dataset {

struct SourceEntry {
  std::string id;          // file stem, unique within a collection
  std::string image_path;
  std::string mask_path;   // empty when the source has no object mask
  std::string kind = "other";
};

struct SourceCollection {
  std::vector<SourceEntry> entries;
};

std::string collection_to_json(const SourceCollection& c);
SourceCollection collection_from_json(const std::string& text);
void write_collection(const SourceCollection& c, const std::string& path);
SourceCollection read_collection(const std::string& path);

// Scans src_dir for PNG images, pairs them with masks of the same stem in
// mask_dir (when given). With auto_mask, maskless images get an Otsu
// threshold segmentation (components >= 50 px, minority class = objects)
// written under <out_dir>/auto_masks/. Problems land in `report`, never
// throw per image.
SourceCollection ingest(const std::string& src_dir,
                        const std::string& mask_dir, bool auto_mask,
                        const std::string& out_dir,
                        std::vector<std::string>& report);

// Otsu-based object mask; components below min_area are dropped. An empty
// result map means segmentation found nothing usable.
raster::LabelMap auto_mask(const raster::Raster& image, int min_area = 50);

struct GenerationConfig {
  uint64_t seed = 0;
  double train_fraction = 0.7;
  int min_manipulated_pixels = 500;
  bool overlap_test_only = true;
  std::vector<int> verbosity_levels = {1, 2, 3};
  // Figures per submodality per split. Simple keys: pristine,
  // copy_move_translation/_flip/_rotation/_rotation90/_rotation180/_random,
  // splicing, overlap, brute_force, inpainting, blurring, contrast.
  std::map<std::string, int> simple;
  // Compound intra keys: the forgery-registry submodalities.
  std::map<std::string, int> compound_intra;
  // Compound inter keys: none, flip, rotation90, rotation180,
  // flip+rotation90, retouching, splicing, overlap.
  std::map<std::string, int> compound_inter;
};

std::string config_to_json(const GenerationConfig& c);
GenerationConfig config_from_json(const std::string& text);

struct GenerateResult {
  annotate::DatasetManifest manifest;
  std::vector<std::string> warnings;  // skipped figures etc.
};

// Builds the dataset tree under out_dir and writes the manifest. Sources are
// split into train/test pools first; figures draw only from their split's
// pool. Byte-deterministic for a fixed (collection, templates, config).
GenerateResult generate(const SourceCollection& sources,
                        const std::vector<compound::Template>& templates,
                        const GenerationConfig& config,
                        const std::string& out_dir, int jobs = 1);

// Machine-checks the dataset invariants; returns violation descriptions
// (empty = clean). When `sources` is given, pristine figures are compared
// against their original pixels.
std::vector<std::string> verify(const std::string& dataset_dir,
                                const SourceCollection* sources = nullptr,
                                int min_manipulated_pixels = 500);

struct EvaluateResult {
  std::vector<metrics::ScoreRecord> records;   // per tampered figure
  std::vector<metrics::AggregateRow> rows;     // grouped aggregation
  std::vector<std::string> flags;              // missing/unreadable detections
};

// Scores detection maps named <figure_id>.png in detections_dir against the
// dataset's ground truth. 16-bit maps are ID maps; 8-bit maps are soft maps
// binarized at `threshold` after min-max normalization.
EvaluateResult evaluate(const std::string& dataset_dir,
                        const std::string& detections_dir,
                        metrics::DetectionMode mode, int threshold,
                        bool pooled, int jobs = 1);

}  // namespace sciforge::dataset
