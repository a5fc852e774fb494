#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sciforge/metrics.hpp"

namespace sciforge::radar {

// Radar chart of f1_ctp scores: one axis per modality (rows of the same
// modality are averaged), one polygon per run. Values live on [0,100].
// Runs are (label, score rows) pairs. Output is a deterministic SVG string.
std::string radar_svg(
    const std::vector<std::pair<std::string, std::vector<metrics::AggregateRow>>>&
        runs);

// Convenience wrapper over CSV payloads as produced by scores_to_csv.
std::string radar_svg_from_csv(
    const std::vector<std::pair<std::string, std::string>>& csv_runs);

}  // namespace sciforge::radar
