#include "sciforge/annotate.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sciforge/png_io.hpp"

namespace sciforge::annotate {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spew(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

json box_to_json(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("rect must be [x0,y0,x1,y1]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace

void validate(const ForgeryRecord& rec, bool pristine) {
  if (rec.figure_id.empty())
    throw std::invalid_argument("record: figure_id empty");
  if (rec.source_refs.empty())
    throw std::invalid_argument("record: source_refs empty");
  if (rec.split != "train" && rec.split != "test")
    throw std::invalid_argument("record: split must be train or test");
  if (rec.verbosity < 0 || rec.verbosity > 3)
    throw std::invalid_argument("record: verbosity out of range");
  if (pristine && !rec.gt_files.empty())
    throw std::invalid_argument("record: pristine figures carry no gt files");
  if (!pristine && rec.gt_files.empty())
    throw std::invalid_argument("record: tampered figures need gt files");
  if (rec.verbosity >= 1 && rec.panel_locations.empty())
    throw std::invalid_argument(
        "record: verbosity >= 1 requires panel locations");
  if (rec.verbosity == 0 && !rec.panel_locations.empty())
    throw std::invalid_argument(
        "record: panel locations require verbosity >= 1");
}

void write_ground_truth(const LabelMap& gt, const std::string& path) {
  png_io::write_label_map(gt, path);
}

LabelMap read_ground_truth(const std::string& path) {
  return png_io::read_label_map(path);
}

std::string metadata_to_json(const ForgeryRecord& rec) {
  json j;
  j["figure_id"] = rec.figure_id;
  j["modality"] = rec.modality;
  j["submodality"] = rec.submodality;
  j["source_refs"] = rec.source_refs;
  json args = json::object();
  for (const auto& [k, v] : rec.method_args) args[k] = v;
  j["method_args"] = args;
  json panels = json::array();
  for (const Box& b : rec.panel_locations) panels.push_back(box_to_json(b));
  j["panel_locations"] = panels;
  j["verbosity"] = rec.verbosity;
  j["seed"] = rec.seed;
  j["split"] = rec.split;
  j["gt_files"] = rec.gt_files;
  return j.dump(2) + "\n";
}

ForgeryRecord metadata_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("metadata parse error: ") +
                                e.what());
  }
  ForgeryRecord rec;
  rec.figure_id = j.at("figure_id").get<std::string>();
  rec.modality = j.at("modality").get<std::string>();
  rec.submodality = j.at("submodality").get<std::string>();
  rec.source_refs = j.at("source_refs").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("method_args").items())
    rec.method_args.emplace_back(k, v.get<std::string>());
  for (const auto& b : j.at("panel_locations"))
    rec.panel_locations.push_back(box_from_json(b));
  rec.verbosity = j.at("verbosity").get<int>();
  rec.seed = j.at("seed").get<uint64_t>();
  rec.split = j.at("split").get<std::string>();
  rec.gt_files = j.at("gt_files").get<std::vector<std::string>>();
  return rec;
}

void write_metadata(const ForgeryRecord& rec, const std::string& path,
                    bool pristine) {
  validate(rec, pristine);
  spew(path, metadata_to_json(rec));
}

ForgeryRecord read_metadata(const std::string& path) {
  return metadata_from_json(slurp(path));
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  DatasetManifest sorted = manifest;
  std::sort(sorted.entries.begin(), sorted.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.figure_id < b.figure_id;
            });
  std::set<std::string> seen;
  for (const ManifestEntry& e : sorted.entries)
    if (!seen.insert(e.figure_id).second)
      throw std::invalid_argument("manifest: duplicate figure_id " +
                                  e.figure_id);
  json arr = json::array();
  for (const ManifestEntry& e : sorted.entries)
    arr.push_back({{"figure_id", e.figure_id},
                   {"split", e.split},
                   {"complexity", e.complexity},
                   {"taxonomy", e.taxonomy},
                   {"submodality", e.submodality},
                   {"verbosity", e.verbosity},
                   {"paths", e.paths}});
  json j;
  j["entries"] = arr;
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest parse error: ") +
                                e.what());
  }
  DatasetManifest m;
  std::set<std::string> seen;
  for (const auto& ej : j.at("entries")) {
    ManifestEntry e;
    e.figure_id = ej.at("figure_id").get<std::string>();
    e.split = ej.at("split").get<std::string>();
    e.complexity = ej.at("complexity").get<std::string>();
    e.taxonomy = ej.at("taxonomy").get<std::string>();
    e.submodality = ej.at("submodality").get<std::string>();
    e.verbosity = ej.at("verbosity").get<int>();
    e.paths = ej.at("paths").get<std::vector<std::string>>();
    if (!seen.insert(e.figure_id).second)
      throw std::invalid_argument("manifest: duplicate figure_id " +
                                  e.figure_id);
    m.entries.push_back(e);
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::string& root) {
  spew((fs::path(root) / "manifest.json").string(),
       manifest_to_json(manifest));
}

DatasetManifest read_manifest(const std::string& root, bool check_paths) {
  const std::string path = (fs::path(root) / "manifest.json").string();
  DatasetManifest m = manifest_from_json(slurp(path));
  if (check_paths) {
    for (const ManifestEntry& e : m.entries)
      for (const std::string& rel : e.paths)
        if (!fs::exists(fs::path(root) / rel))
          throw std::runtime_error("manifest path missing: " + rel);
  }
  return m;
}

}  // namespace sciforge::annotate
