#include "sciforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sciforge::metrics {

LabelMap binarize_detection(const Raster& soft, int threshold) {
  if (soft.channels != 1)
    throw std::invalid_argument("soft map must be single-channel");
  uint8_t lo = 255, hi = 0;
  for (uint8_t v : soft.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  LabelMap out(soft.width, soft.height, 0);
  if (hi == lo) return out;  // constant map -> all zeros
  for (size_t i = 0; i < soft.data.size(); ++i) {
    int norm = (soft.data[i] - lo) * 255 / (hi - lo);
    out.ids[i] = norm > threshold ? 1 : 0;
  }
  return out;
}

ConfusionCounts pixel_confusion(const LabelMap& gt, const LabelMap& dm) {
  if (gt.width != dm.width || gt.height != dm.height)
    throw std::invalid_argument("gt/dm dimension mismatch");
  ConfusionCounts c;
  for (size_t i = 0; i < gt.ids.size(); ++i) {
    bool g = gt.ids[i] != 0, d = dm.ids[i] != 0;
    if (g && d) ++c.tp;
    else if (!g && d) ++c.fp;
    else if (g && !d) ++c.fn;
    else ++c.tn;
  }
  return c;
}

uint64_t consistent_true_positive(const LabelMap& gt, const LabelMap& dm,
                                  int connectivity) {
  if (gt.width != dm.width || gt.height != dm.height)
    throw std::invalid_argument("gt/dm dimension mismatch");

  const std::vector<raster::Component> gt_comps =
      raster::connected_components(gt, connectivity);
  const std::vector<uint16_t> dm_ids = dm.distinct_ids();
  const std::vector<uint16_t> gt_ids = gt.distinct_ids();

  uint64_t ctp = 0;
  for (uint16_t did : dm_ids) {
    std::vector<uint8_t> in_dm(gt.ids.size(), 0);
    for (size_t i = 0; i < dm.ids.size(); ++i)
      if (dm.ids[i] == did) in_dm[i] = 1;

    // Per ground-truth region: intersection area and number of its
    // components the detected region touches.
    std::map<uint16_t, uint64_t> inter;
    std::map<uint16_t, int> comps_hit;
    for (const raster::Component& c : gt_comps) {
      uint64_t a = 0;
      for (const raster::Pixel& p : c.pixels)
        if (in_dm[static_cast<size_t>(p.y) * gt.width + p.x]) ++a;
      if (a > 0) {
        inter[c.region_id] += a;
        comps_hit[c.region_id] += 1;
      }
    }

    uint16_t best_id = 0;
    uint64_t best_area = 0;
    for (uint16_t gid : gt_ids) {
      auto hit = comps_hit.find(gid);
      if (hit == comps_hit.end() || hit->second < 2) continue;
      uint64_t a = inter[gid];
      if (a > best_area) {  // ties resolve to the smallest gt ID
        best_area = a;
        best_id = gid;
      }
    }
    if (best_id != 0) ctp += best_area;
  }
  return ctp;
}

double f1(uint64_t tp_like, uint64_t fn, uint64_t fp) {
  const uint64_t denom = 2 * tp_like + fn + fp;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_like) / denom;
}

double precision(uint64_t tp_like, uint64_t fp) {
  const uint64_t denom = tp_like + fp;
  return denom == 0 ? 0.0 : static_cast<double>(tp_like) / denom;
}

ScoreRecord evaluate_figure(const LabelMap& gt, const LabelMap& dm,
                            DetectionMode mode) {
  LabelMap effective = dm;
  if (mode == DetectionMode::IdLess)
    for (uint16_t& v : effective.ids) v = v != 0 ? 1 : 0;

  ScoreRecord r;
  r.counts = pixel_confusion(gt, effective);
  r.counts.ctp = consistent_true_positive(gt, effective);
  r.f1_tp = f1(r.counts.tp, r.counts.fn, r.counts.fp);
  r.f1_ctp = f1(r.counts.ctp, r.counts.fn, r.counts.fp);
  r.precision_tp = precision(r.counts.tp, r.counts.fp);
  r.precision_ctp = precision(r.counts.ctp, r.counts.fp);
  return r;
}

ScoreRecord evaluate_figure(const LabelMap& gt, const Raster& soft,
                            DetectionMode mode, int threshold) {
  return evaluate_figure(gt, binarize_detection(soft, threshold), mode);
}

std::vector<AggregateRow> aggregate_scores(
    const std::vector<ScoreRecord>& records, bool pooled) {
  if (records.empty()) throw std::invalid_argument("no records to aggregate");
  using Key = std::tuple<std::string, std::string, int>;
  struct Acc {
    size_t n = 0;
    double f1_tp = 0, f1_ctp = 0, p_tp = 0, p_ctp = 0;
    ConfusionCounts pool;
  };
  std::map<Key, Acc> groups;
  for (const ScoreRecord& r : records) {
    Acc& a = groups[{r.modality, r.submodality, r.verbosity}];
    ++a.n;
    a.f1_tp += r.f1_tp;
    a.f1_ctp += r.f1_ctp;
    a.p_tp += r.precision_tp;
    a.p_ctp += r.precision_ctp;
    a.pool.tp += r.counts.tp;
    a.pool.fp += r.counts.fp;
    a.pool.fn += r.counts.fn;
    a.pool.tn += r.counts.tn;
    a.pool.ctp += r.counts.ctp;
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, a] : groups) {
    AggregateRow row;
    row.modality = std::get<0>(key);
    row.submodality = std::get<1>(key);
    row.verbosity = std::get<2>(key);
    row.n = a.n;
    if (pooled) {
      row.f1_tp = 100.0 * f1(a.pool.tp, a.pool.fn, a.pool.fp);
      row.f1_ctp = 100.0 * f1(a.pool.ctp, a.pool.fn, a.pool.fp);
      row.precision_tp = 100.0 * precision(a.pool.tp, a.pool.fp);
      row.precision_ctp = 100.0 * precision(a.pool.ctp, a.pool.fp);
    } else {
      row.f1_tp = 100.0 * a.f1_tp / a.n;
      row.f1_ctp = 100.0 * a.f1_ctp / a.n;
      row.precision_tp = 100.0 * a.p_tp / a.n;
      row.precision_ctp = 100.0 * a.p_ctp / a.n;
    }
    rows.push_back(row);
  }
  return rows;  // map iteration = sorted by (modality, submodality, verbosity)
}

std::string scores_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "modality,submodality,verbosity,n,f1_tp,f1_ctp,precision_tp,"
      "precision_ctp\n";
  char buf[256];
  for (const AggregateRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%zu,%.2f,%.2f,%.2f,%.2f\n",
                  r.modality.c_str(), r.submodality.c_str(), r.verbosity, r.n,
                  r.f1_tp, r.f1_ctp, r.precision_tp, r.precision_ctp);
    out += buf;
  }
  return out;
}

std::vector<AggregateRow> scores_from_csv(const std::string& csv) {
  std::vector<AggregateRow> rows;
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;  // header
    }
    std::istringstream ls(line);
    AggregateRow r;
    std::string field;
    std::getline(ls, r.modality, ',');
    std::getline(ls, r.submodality, ',');
    std::getline(ls, field, ',');
    r.verbosity = std::stoi(field);
    std::getline(ls, field, ',');
    r.n = static_cast<size_t>(std::stoull(field));
    std::getline(ls, field, ',');
    r.f1_tp = std::stod(field);
    std::getline(ls, field, ',');
    r.f1_ctp = std::stod(field);
    std::getline(ls, field, ',');
    r.precision_tp = std::stod(field);
    std::getline(ls, field, ',');
    r.precision_ctp = std::stod(field);
    rows.push_back(r);
  }
  return rows;
}

std::string scores_to_json(const std::vector<AggregateRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const AggregateRow& r : rows) {
    arr.push_back({{"modality", r.modality},
                   {"submodality", r.submodality},
                   {"verbosity", r.verbosity},
                   {"n", r.n},
                   {"f1_tp", r.f1_tp},
                   {"f1_ctp", r.f1_ctp},
                   {"precision_tp", r.precision_tp},
                   {"precision_ctp", r.precision_ctp}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace sciforge::metrics
