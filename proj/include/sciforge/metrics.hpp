#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sciforge/raster.hpp"

namespace sciforge::metrics {

using raster::LabelMap;
using raster::Raster;

struct ConfusionCounts {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  uint64_t ctp = 0;
};

struct ScoreRecord {
  std::string figure_id;
  std::string modality;
  std::string submodality;
  int verbosity = 0;
  ConfusionCounts counts;
  double f1_tp = 0.0, f1_ctp = 0.0;
  double precision_tp = 0.0, precision_ctp = 0.0;
};

enum class DetectionMode { Id, IdLess };

// Min-max normalizes a single-channel soft map to [0,255] (a constant map
// normalizes to all zeros) and marks every value > threshold as ID 1.
LabelMap binarize_detection(const Raster& soft, int threshold = 100);

ConfusionCounts pixel_confusion(const LabelMap& gt, const LabelMap& dm);

// Consistent true positives: a detected region only counts where at least
// two connected components of one ground-truth region intersect it; of the
// qualifying regions, only the one with the maximum intersection counts
// (ties go to the smallest ground-truth ID).
uint64_t consistent_true_positive(const LabelMap& gt, const LabelMap& dm,
                                  int connectivity = 8);

// Score formulas; a zero denominator yields 0.
double f1(uint64_t tp_like, uint64_t fn, uint64_t fp);
double precision(uint64_t tp_like, uint64_t fp);

ScoreRecord evaluate_figure(const LabelMap& gt, const LabelMap& dm,
                            DetectionMode mode);
ScoreRecord evaluate_figure(const LabelMap& gt, const Raster& soft,
                            DetectionMode mode, int threshold);

struct AggregateRow {
  std::string modality;
  std::string submodality;
  int verbosity = 0;
  size_t n = 0;
  // Means on the [0,100] scale.
  double f1_tp = 0.0, f1_ctp = 0.0, precision_tp = 0.0, precision_ctp = 0.0;
};

// Mean of per-figure scores per (modality, submodality, verbosity) group,
// normalized to [0,100]. `pooled` instead pools the confusion counts of the
// group and scores once.
std::vector<AggregateRow> aggregate_scores(
    const std::vector<ScoreRecord>& records, bool pooled = false);

std::string scores_to_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> scores_from_csv(const std::string& csv);
std::string scores_to_json(const std::vector<AggregateRow>& rows);

}  // namespace sciforge::metrics
