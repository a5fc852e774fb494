#include "sciforge/dataset.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sciforge/forge.hpp"
#include "sciforge/png_io.hpp"
#include "sciforge/rng.hpp"

namespace sciforge::dataset {

namespace fs = std::filesystem;
using nlohmann::json;
using raster::LabelMap;
using raster::Pixel;
using raster::Raster;

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
}

// Taxonomy bucket and directory leaf for a simple-figure submodality.
struct Category {
  std::string taxonomy;  // pristine | duplication | cleaning | retouching
  std::string dir;       // path below simple/<split>/
};

Category simple_category(const std::string& sub) {
  if (sub == "pristine") return {"pristine", "pristine"};
  if (sub.rfind("copy_move", 0) == 0)
    return {"duplication", "duplication/copy_move"};
  if (sub == "splicing") return {"duplication", "duplication/splicing"};
  if (sub == "overlap") return {"duplication", "duplication/overlap"};
  if (sub == "brute_force") return {"cleaning", "cleaning/brute_force"};
  if (sub == "inpainting") return {"cleaning", "cleaning/inpainting"};
  if (sub == "blurring") return {"retouching", "retouching/blurring"};
  if (sub == "contrast") return {"retouching", "retouching/contrast"};
  throw std::invalid_argument("unknown simple submodality: " + sub);
}

std::string compound_taxonomy(const std::string& mode_dir,
                              const std::string& sub) {
  if (mode_dir == "inter_panel") return "duplication";
  return simple_category(sub).taxonomy;
}

const std::set<std::string>& inter_submodalities() {
  static const std::set<std::string> s = {
      "none",       "flip",     "rotation90", "rotation180",
      "flip+rotation90", "retouching", "splicing", "overlap"};
  return s;
}

compound::PanelTransform inter_transform(const std::string& sub) {
  if (sub == "none") return compound::PanelTransform::None;
  if (sub == "flip") return compound::PanelTransform::Flip;
  if (sub == "rotation90") return compound::PanelTransform::Rotation90;
  if (sub == "rotation180") return compound::PanelTransform::Rotation180;
  if (sub == "flip+rotation90") return compound::PanelTransform::FlipRotation90;
  return compound::PanelTransform::Retouching;
}

struct LoadedSource {
  SourceEntry entry;
  Raster image;
  LabelMap objects;  // empty dims when no mask
  bool has_mask = false;
};

struct Pools {
  std::vector<size_t> all;     // indices into loaded sources
  std::vector<size_t> masked;  // subset with object masks
};

struct Context {
  std::vector<LoadedSource> sources;
  std::map<std::string, Pools> pools;  // by split
  const std::vector<compound::Template>* templates = nullptr;
  GenerationConfig config;
};

struct Job {
  std::string figure_id;
  std::string split;
  std::string kind;  // pristine | simple | splice | overlap | intra | inter
  std::string submodality;
  int verbosity = 0;
  size_t index = 0;  // per-category counter, drives pristine selection
  uint64_t seed = 0;
};

struct OutImage { std::string rel; Raster img; };
struct OutLabel { std::string rel; LabelMap map; };
struct OutText { std::string rel; std::string text; };

struct JobResult {
  bool ok = false;
  std::string warning;
  std::vector<OutImage> images;
  std::vector<OutLabel> labels;
  std::vector<OutText> texts;
  std::vector<annotate::ManifestEntry> entries;
};

const LoadedSource& pick(const Context& ctx, const std::string& split,
                         bool need_mask, Rng& rng) {
  const Pools& p = ctx.pools.at(split);
  const std::vector<size_t>& pool = need_mask ? p.masked : p.all;
  if (pool.empty())
    throw std::runtime_error("insufficient sources: no " +
                             std::string(need_mask ? "masked " : "") +
                             "sources in split " + split);
  return ctx.sources[pool[rng.uniform(pool.size())]];
}

std::vector<compound::SourceImage> fill_pool_for(const Context& ctx,
                                                 const std::string& split,
                                                 const std::string& skip_ref) {
  std::vector<compound::SourceImage> pool;
  for (size_t idx : ctx.pools.at(split).all) {
    const LoadedSource& s = ctx.sources[idx];
    if (s.entry.id == skip_ref) continue;
    pool.push_back({s.image, s.objects, s.entry.id});
    if (pool.size() >= 6) break;  // bound per-figure fill cost
  }
  return pool;
}

bool copy_move_like(const std::string& complexity, const std::string& taxonomy,
                    const std::string& sub) {
  if (sub.rfind("copy_move", 0) == 0) return true;
  if (complexity == "compound" && taxonomy == "duplication")
    return inter_submodalities().count(sub) > 0 && sub != "splicing" &&
           sub != "overlap";
  return false;
}

// Every gt ID must decompose into >= 2 connected components (source + copy).
bool has_paired_components(const LabelMap& gt) {
  std::map<uint16_t, int> per_id;
  for (const auto& c : raster::connected_components(gt, 8))
    per_id[c.region_id] += 1;
  if (per_id.empty()) return false;
  for (const auto& [id, n] : per_id)
    if (n < 2) return false;
  return true;
}

annotate::ForgeryRecord base_record(const Job& job, uint64_t attempt_seed) {
  annotate::ForgeryRecord rec;
  rec.figure_id = job.figure_id;
  rec.submodality = job.submodality;
  rec.verbosity = job.verbosity;
  rec.seed = attempt_seed;
  rec.split = job.split;
  return rec;
}

JobResult run_pristine(const Context& ctx, const Job& job) {
  const Pools& p = ctx.pools.at(job.split);
  if (job.index >= p.all.size())
    throw std::runtime_error("insufficient sources: pristine count exceeds " +
                             job.split + " pool");
  const LoadedSource& src = ctx.sources[p.all[job.index]];
  const std::string dir = "simple/" + job.split + "/pristine/";

  JobResult res;
  res.ok = true;
  res.images.push_back({dir + job.figure_id + ".png", src.image});
  annotate::ForgeryRecord rec = base_record(job, job.seed);
  rec.modality = "pristine";
  rec.source_refs = {src.entry.id};
  annotate::validate(rec, true);
  res.texts.push_back({dir + job.figure_id + "_meta.json",
                       annotate::metadata_to_json(rec)});
  res.entries.push_back({job.figure_id, job.split, "simple", "pristine", "",
                         0,
                         {dir + job.figure_id + ".png",
                          dir + job.figure_id + "_meta.json"}});
  return res;
}

void emit_tampered(JobResult& res, const Job& job, const std::string& dir,
                   const std::string& complexity, const std::string& taxonomy,
                   const Raster& image, const LabelMap& gt,
                   const std::optional<LabelMap>& gt2,
                   annotate::ForgeryRecord rec) {
  const std::string base = dir + job.figure_id;
  res.images.push_back({base + ".png", image});
  res.labels.push_back({base + "_gt.png", gt});
  rec.gt_files = {base + "_gt.png"};
  std::vector<std::string> paths = {base + ".png", base + "_gt.png"};
  if (gt2) {
    res.labels.push_back({base + "_gt2.png", *gt2});
    rec.gt_files.push_back(base + "_gt2.png");
    paths.push_back(base + "_gt2.png");
  }
  annotate::validate(rec, false);
  res.texts.push_back({base + "_meta.json", annotate::metadata_to_json(rec)});
  paths.push_back(base + "_meta.json");
  res.entries.push_back({job.figure_id, job.split, complexity, taxonomy,
                         job.submodality, job.verbosity, paths});
}

// Cleaning secondary map: remap its IDs to start after the primary's max.
std::optional<LabelMap> shifted_secondary(const forge::ForgeryOutput& fo) {
  if (!fo.gt_secondary) return std::nullopt;
  uint16_t max_id = 0;
  for (uint16_t v : fo.gt.ids) max_id = std::max(max_id, v);
  LabelMap out = *fo.gt_secondary;
  std::vector<uint16_t> ids = fo.gt_secondary->distinct_ids();
  std::map<uint16_t, uint16_t> remap;
  uint16_t next = static_cast<uint16_t>(max_id + 1);
  for (uint16_t id : ids) remap[id] = next++;
  for (uint16_t& v : out.ids)
    if (v != 0) v = remap[v];
  return out;
}

JobResult run_simple_forge(const Context& ctx, const Job& job) {
  const Category cat = simple_category(job.submodality);
  const std::string dir = "simple/" + job.split + "/" + cat.dir + "/";
  JobResult res;
  for (int retry = 0; retry < 5; ++retry) {
    const uint64_t seed = Rng::derive(job.seed, retry);
    Rng rng(seed);
    try {
      const LoadedSource& src = pick(ctx, job.split, true, rng);
      forge::ForgeryOutput fo = forge::default_registry().at(job.submodality)(
          src.image, src.objects, seed);
      if (static_cast<int>(fo.gt.count_nonzero()) <
          ctx.config.min_manipulated_pixels)
        continue;
      if (job.submodality.rfind("copy_move", 0) == 0 &&
          !has_paired_components(fo.gt))
        continue;
      annotate::ForgeryRecord rec = base_record(job, seed);
      rec.modality = cat.taxonomy;
      rec.source_refs = {src.entry.id};
      for (const auto& [k, v] : fo.params) rec.method_args.emplace_back(k, v);
      res.ok = true;
      emit_tampered(res, job, dir, "simple", cat.taxonomy, fo.image, fo.gt,
                    shifted_secondary(fo), rec);
      return res;
    } catch (const std::exception& e) {
      if (std::string(e.what()).rfind("insufficient sources", 0) == 0) throw;
      continue;
    }
  }
  res.warning = "skipped " + job.figure_id + " (" + job.submodality +
                "): no valid figure within retry budget";
  return res;
}

JobResult run_splice(const Context& ctx, const Job& job) {
  const std::string dir = "simple/" + job.split + "/duplication/splicing/";
  JobResult res;
  for (int retry = 0; retry < 5; ++retry) {
    const uint64_t seed = Rng::derive(job.seed, retry);
    Rng rng(seed);
    try {
      const LoadedSource& donor = pick(ctx, job.split, true, rng);
      const LoadedSource& host = pick(ctx, job.split, false, rng);
      if (host.entry.id == donor.entry.id) continue;
      const std::vector<uint16_t> ids = donor.objects.distinct_ids();
      const uint16_t donor_id = ids[rng.uniform(ids.size())];
      // Host object map (all zero when maskless) guides placement.
      LabelMap host_obj = host.has_mask
                              ? host.objects
                              : LabelMap(host.image.width, host.image.height, 0);
      forge::ForgeryOutput fo = forge::splice(host.image, host_obj,
                                              donor.image, donor.objects,
                                              donor_id, seed);
      if (static_cast<int>(fo.gt.count_nonzero()) <
          ctx.config.min_manipulated_pixels)
        continue;
      annotate::ForgeryRecord rec = base_record(job, seed);
      rec.modality = "duplication";
      rec.source_refs = {host.entry.id, donor.entry.id};
      for (const auto& [k, v] : fo.params) rec.method_args.emplace_back(k, v);
      res.ok = true;
      emit_tampered(res, job, dir, "simple", "duplication", fo.image, fo.gt,
                    std::nullopt, rec);
      return res;
    } catch (const std::exception& e) {
      if (std::string(e.what()).rfind("insufficient sources", 0) == 0) throw;
      continue;
    }
  }
  res.warning = "skipped " + job.figure_id + " (splicing): retry budget";
  return res;
}

JobResult run_overlap(const Context& ctx, const Job& job) {
  const std::string dir = "simple/" + job.split + "/duplication/overlap/";
  JobResult res;
  for (int retry = 0; retry < 5; ++retry) {
    const uint64_t seed = Rng::derive(job.seed, retry);
    Rng rng(seed);
    try {
      const LoadedSource& src = pick(ctx, job.split, false, rng);
      const int cw = src.image.width / 2, ch = src.image.height / 2;
      forge::OverlapPair pair =
          forge::overlap_split(src.image, cw, ch, 0.5, std::nullopt, seed);
      if (static_cast<int>(pair.gt_a.count_nonzero()) <
          ctx.config.min_manipulated_pixels)
        continue;
      res.ok = true;
      for (int half = 0; half < 2; ++half) {
        Job sub_job = job;
        sub_job.figure_id = job.figure_id + (half == 0 ? "a" : "b");
        annotate::ForgeryRecord rec = base_record(sub_job, seed);
        rec.modality = "duplication";
        rec.source_refs = {src.entry.id};
        rec.method_args = {
            {"counterpart", job.figure_id + (half == 0 ? "b" : "a")},
            {"post_processed", pair.post_processed}};
        emit_tampered(res, sub_job, dir, "simple", "duplication",
                      half == 0 ? pair.image_a : pair.image_b,
                      half == 0 ? pair.gt_a : pair.gt_b, std::nullopt, rec);
      }
      return res;
    } catch (const std::exception& e) {
      if (std::string(e.what()).rfind("insufficient sources", 0) == 0) throw;
      continue;
    }
  }
  res.warning = "skipped " + job.figure_id + " (overlap): retry budget";
  return res;
}

JobResult run_compound(const Context& ctx, const Job& job) {
  const bool intra = job.kind == "intra";
  const std::string mode_dir = intra ? "intra_panel" : "inter_panel";
  const std::string taxonomy = compound_taxonomy(mode_dir, job.submodality);
  const std::string dir = "compound/" + job.split + "/" + mode_dir + "/" +
                          job.submodality + "/verbosity_" +
                          std::to_string(job.verbosity) + "/";
  JobResult res;
  for (int retry = 0; retry < 5; ++retry) {
    const uint64_t seed = Rng::derive(job.seed, retry);
    Rng rng(seed);
    try {
      compound::CompoundFigure fig;
      std::vector<std::string> refs;
      if (intra) {
        const LoadedSource& src = pick(ctx, job.split, true, rng);
        compound::SourceImage si{src.image, src.objects, src.entry.id};
        fig = compound::build_compound_intra(
            *ctx.templates, si, job.submodality,
            fill_pool_for(ctx, job.split, src.entry.id), job.verbosity, seed);
        refs = {src.entry.id};
      } else if (job.submodality == "splicing") {
        const LoadedSource& donor = pick(ctx, job.split, true, rng);
        const LoadedSource& host = pick(ctx, job.split, false, rng);
        if (host.entry.id == donor.entry.id) continue;
        std::vector<compound::SourceImage> srcs = {
            {donor.image, donor.objects, donor.entry.id},
            {host.image,
             host.has_mask ? host.objects
                           : LabelMap(host.image.width, host.image.height, 0),
             host.entry.id}};
        fig = compound::build_compound_inter(
            *ctx.templates, srcs, compound::InterMode::Splicing,
            compound::PanelTransform::None, std::nullopt,
            fill_pool_for(ctx, job.split, donor.entry.id), job.verbosity,
            seed);
        refs = {donor.entry.id, host.entry.id};
      } else {
        const LoadedSource& src = pick(ctx, job.split, false, rng);
        const bool overlap = job.submodality == "overlap";
        fig = compound::build_compound_inter(
            *ctx.templates, {{src.image, src.objects, src.entry.id}},
            overlap ? compound::InterMode::Overlap
                    : compound::InterMode::PanelDuplication,
            inter_transform(job.submodality), std::nullopt,
            fill_pool_for(ctx, job.split, src.entry.id), job.verbosity, seed);
        refs = {src.entry.id};
      }
      if (static_cast<int>(fig.gt.count_nonzero()) <
          ctx.config.min_manipulated_pixels)
        continue;
      if (copy_move_like("compound", taxonomy, job.submodality) &&
          !has_paired_components(fig.gt))
        continue;
      annotate::ForgeryRecord rec = base_record(job, seed);
      rec.modality = taxonomy;
      rec.source_refs = refs;
      for (const auto& [k, v] : fig.params) rec.method_args.emplace_back(k, v);
      if (job.verbosity >= 1)
        for (const auto& p : fig.panel_layout)
          rec.panel_locations.push_back(p.rect);
      res.ok = true;
      emit_tampered(res, job, dir, "compound", taxonomy, fig.image, fig.gt,
                    std::nullopt, rec);
      return res;
    } catch (const std::exception& e) {
      if (std::string(e.what()).rfind("insufficient sources", 0) == 0) throw;
      continue;
    }
  }
  res.warning = "skipped " + job.figure_id + " (" + mode_dir + "/" +
                job.submodality + "): retry budget";
  return res;
}

JobResult run_job(const Context& ctx, const Job& job) {
  if (job.kind == "pristine") return run_pristine(ctx, job);
  if (job.kind == "splice") return run_splice(ctx, job);
  if (job.kind == "overlap") return run_overlap(ctx, job);
  if (job.kind == "simple") return run_simple_forge(ctx, job);
  return run_compound(ctx, job);
}

}  // namespace

// ---- collection ----------------------------------------------------------

std::string collection_to_json(const SourceCollection& c) {
  json arr = json::array();
  for (const SourceEntry& e : c.entries)
    arr.push_back({{"id", e.id},
                   {"image", e.image_path},
                   {"mask", e.mask_path},
                   {"kind", e.kind}});
  json j;
  j["sources"] = arr;
  return j.dump(2) + "\n";
}

SourceCollection collection_from_json(const std::string& text) {
  json j = json::parse(text);
  SourceCollection c;
  for (const auto& ej : j.at("sources")) {
    SourceEntry e;
    e.id = ej.at("id").get<std::string>();
    e.image_path = ej.at("image").get<std::string>();
    e.mask_path = ej.at("mask").get<std::string>();
    e.kind = ej.value("kind", "other");
    c.entries.push_back(e);
  }
  return c;
}

void write_collection(const SourceCollection& c, const std::string& path) {
  spew(path, collection_to_json(c));
}

SourceCollection read_collection(const std::string& path) {
  return collection_from_json(slurp(path));
}

LabelMap auto_mask(const Raster& image, int min_area) {
  const Raster gray = raster::to_gray(image);
  // Otsu threshold over the gray histogram.
  std::array<uint64_t, 256> hist{};
  for (uint8_t v : gray.data) ++hist[v];
  const uint64_t total = gray.data.size();
  double sum = 0;
  for (int i = 0; i < 256; ++i) sum += static_cast<double>(i) * hist[i];
  double sum_b = 0, max_var = -1.0;
  uint64_t w_b = 0;
  int threshold = 127;
  for (int t = 0; t < 256; ++t) {
    w_b += hist[t];
    if (w_b == 0) continue;
    uint64_t w_f = total - w_b;
    if (w_f == 0) break;
    sum_b += static_cast<double>(t) * hist[t];
    double m_b = sum_b / w_b;
    double m_f = (sum - sum_b) / w_f;
    double var = static_cast<double>(w_b) * w_f * (m_b - m_f) * (m_b - m_f);
    if (var > max_var) {
      max_var = var;
      threshold = t;
    }
  }
  // Objects = minority class.
  uint64_t above = 0;
  for (uint8_t v : gray.data)
    if (v > threshold) ++above;
  const bool objects_above = above * 2 < total;
  LabelMap fg(image.width, image.height, 0);
  for (size_t i = 0; i < gray.data.size(); ++i)
    fg.ids[i] = (gray.data[i] > threshold) == objects_above ? 1 : 0;

  LabelMap out(image.width, image.height, 0);
  uint16_t next = 1;
  for (const auto& comp : raster::connected_components(fg, 8)) {
    if (comp.area < min_area) continue;
    if (next == 0) break;  // ID space exhausted
    for (const Pixel& p : comp.pixels) out.at(p.x, p.y) = next;
    ++next;
  }
  return out;
}

SourceCollection ingest(const std::string& src_dir,
                        const std::string& mask_dir, bool use_auto_mask,
                        const std::string& out_dir,
                        std::vector<std::string>& report) {
  if (!fs::is_directory(src_dir))
    throw std::runtime_error("source directory missing: " + src_dir);
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(src_dir))
    if (de.is_regular_file() && de.path().extension() == ".png")
      files.push_back(de.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) report.push_back("warning: no PNG images in " + src_dir);

  SourceCollection c;
  for (const fs::path& f : files) {
    Raster img;
    try {
      img = png_io::read_image(f.string());
    } catch (const std::exception& e) {
      report.push_back("rejected " + f.filename().string() + ": " + e.what());
      continue;
    }
    SourceEntry e;
    e.id = f.stem().string();
    e.image_path = f.string();
    if (!mask_dir.empty()) {
      fs::path mp = fs::path(mask_dir) / f.filename();
      if (fs::exists(mp)) {
        try {
          LabelMap mask = png_io::read_label_map(mp.string());
          if (mask.width != img.width || mask.height != img.height) {
            report.push_back("rejected " + f.filename().string() +
                             ": mask dimensions mismatch");
            continue;
          }
          e.mask_path = mp.string();
        } catch (const std::exception& ex) {
          report.push_back("rejected " + f.filename().string() +
                           ": bad mask: " + ex.what());
          continue;
        }
      }
    }
    if (e.mask_path.empty() && use_auto_mask) {
      LabelMap mask = auto_mask(img);
      if (mask.count_nonzero() > 0) {
        fs::path adir = fs::path(out_dir) / "auto_masks";
        fs::create_directories(adir);
        fs::path mp = adir / f.filename();
        png_io::write_label_map(mask, mp.string());
        e.mask_path = mp.string();
      } else {
        report.push_back("flagged " + f.filename().string() +
                         ": auto-mask found no objects");
      }
    } else if (e.mask_path.empty()) {
      report.push_back("flagged " + f.filename().string() +
                       ": no object mask (mask-free forgeries only)");
    }
    c.entries.push_back(e);
  }
  return c;
}

// ---- config --------------------------------------------------------------

namespace {

void validate_config(const GenerationConfig& c) {
  if (c.train_fraction <= 0.0 || c.train_fraction >= 1.0)
    throw std::invalid_argument("train_fraction must be in (0,1)");
  if (c.min_manipulated_pixels < 1)
    throw std::invalid_argument("min_manipulated_pixels must be >= 1");
  auto check_counts = [](const std::map<std::string, int>& m,
                         const char* what) {
    for (const auto& [k, v] : m)
      if (v < 0)
        throw std::invalid_argument(std::string(what) + " count negative: " + k);
  };
  check_counts(c.simple, "simple");
  check_counts(c.compound_intra, "compound_intra");
  check_counts(c.compound_inter, "compound_inter");
  for (const auto& [k, v] : c.simple)
    simple_category(k);  // throws on unknown keys
  for (const auto& [k, v] : c.compound_intra)
    if (forge::default_registry().find(k) == forge::default_registry().end())
      throw std::invalid_argument("unknown compound_intra submodality: " + k);
  for (const auto& [k, v] : c.compound_inter)
    if (!inter_submodalities().count(k))
      throw std::invalid_argument("unknown compound_inter submodality: " + k);
  for (int v : c.verbosity_levels)
    if (v < 1 || v > 3)
      throw std::invalid_argument("verbosity levels must be 1..3");
}

}  // namespace

std::string config_to_json(const GenerationConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["train_fraction"] = c.train_fraction;
  j["min_manipulated_pixels"] = c.min_manipulated_pixels;
  j["overlap_test_only"] = c.overlap_test_only;
  j["verbosity_levels"] = c.verbosity_levels;
  j["simple"] = c.simple;
  j["compound_intra"] = c.compound_intra;
  j["compound_inter"] = c.compound_inter;
  return j.dump(2) + "\n";
}

GenerationConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  GenerationConfig c;
  c.seed = j.value("seed", uint64_t{0});
  c.train_fraction = j.value("train_fraction", 0.7);
  c.min_manipulated_pixels = j.value("min_manipulated_pixels", 500);
  c.overlap_test_only = j.value("overlap_test_only", true);
  if (j.contains("verbosity_levels"))
    c.verbosity_levels = j["verbosity_levels"].get<std::vector<int>>();
  if (j.contains("simple"))
    c.simple = j["simple"].get<std::map<std::string, int>>();
  if (j.contains("compound_intra"))
    c.compound_intra = j["compound_intra"].get<std::map<std::string, int>>();
  if (j.contains("compound_inter"))
    c.compound_inter = j["compound_inter"].get<std::map<std::string, int>>();
  validate_config(c);
  return c;
}

// ---- generate ------------------------------------------------------------

GenerateResult generate(const SourceCollection& sources,
                        const std::vector<compound::Template>& templates,
                        const GenerationConfig& config,
                        const std::string& out_dir, int jobs) {
  validate_config(config);
  if (sources.entries.empty())
    throw std::invalid_argument("source collection is empty");
  const bool need_templates =
      !config.compound_intra.empty() || !config.compound_inter.empty();
  if (need_templates && templates.empty())
    throw std::invalid_argument("templates required for compound figures");

  Context ctx;
  ctx.templates = &templates;
  ctx.config = config;
  for (const SourceEntry& e : sources.entries) {
    LoadedSource s;
    s.entry = e;
    s.image = png_io::read_image(e.image_path);
    if (!e.mask_path.empty()) {
      s.objects = png_io::read_label_map(e.mask_path);
      if (s.objects.width != s.image.width ||
          s.objects.height != s.image.height)
        throw std::runtime_error("mask dimensions mismatch for " + e.id);
      s.has_mask = s.objects.count_nonzero() > 0;
    }
    if (!s.has_mask) s.objects = LabelMap(s.image.width, s.image.height, 0);
    ctx.sources.push_back(std::move(s));
  }
  std::sort(ctx.sources.begin(), ctx.sources.end(),
            [](const LoadedSource& a, const LoadedSource& b) {
              return a.entry.id < b.entry.id;
            });

  // Split the source pool before any figure is generated.
  std::vector<size_t> order(ctx.sources.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(Rng::derive(config.seed, 0x5917));
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[split_rng.uniform(i)]);
  const size_t train_n = static_cast<size_t>(
      std::lround(config.train_fraction * static_cast<double>(order.size())));
  for (size_t i = 0; i < order.size(); ++i) {
    const std::string split = i < train_n ? "train" : "test";
    ctx.pools[split].all.push_back(order[i]);
    if (ctx.sources[order[i]].has_mask)
      ctx.pools[split].masked.push_back(order[i]);
  }
  ctx.pools["train"];  // ensure both keys exist
  ctx.pools["test"];
  for (auto& [split, p] : ctx.pools) {
    std::sort(p.all.begin(), p.all.end());
    std::sort(p.masked.begin(), p.masked.end());
  }

  // Lay out every figure slot deterministically before running anything.
  std::vector<Job> job_list;
  size_t counter = 0;
  auto add_job = [&](const std::string& split, const std::string& kind,
                     const std::string& sub, int verbosity, size_t index) {
    Job j;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "fig_%06zu", counter);
    j.figure_id = buf;
    j.split = split;
    j.kind = kind;
    j.submodality = sub;
    j.verbosity = verbosity;
    j.index = index;
    j.seed = Rng::derive(config.seed, counter);
    ++counter;
    job_list.push_back(j);
  };
  for (const std::string split : {"train", "test"}) {
    for (const auto& [sub, count] : config.simple) {
      if (sub == "overlap" && config.overlap_test_only && split == "train")
        continue;
      for (int i = 0; i < count; ++i) {
        if (sub == "pristine")
          add_job(split, "pristine", sub, 0, static_cast<size_t>(i));
        else if (sub == "splicing")
          add_job(split, "splice", sub, 0, static_cast<size_t>(i));
        else if (sub == "overlap")
          add_job(split, "overlap", sub, 0, static_cast<size_t>(i));
        else
          add_job(split, "simple", sub, 0, static_cast<size_t>(i));
      }
    }
    for (const auto& [sub, count] : config.compound_intra)
      for (int v : config.verbosity_levels)
        for (int i = 0; i < count; ++i)
          add_job(split, "intra", sub, v, static_cast<size_t>(i));
    for (const auto& [sub, count] : config.compound_inter) {
      if (sub == "overlap" && config.overlap_test_only && split == "train")
        continue;
      for (int v : config.verbosity_levels)
        for (int i = 0; i < count; ++i)
          add_job(split, "inter", sub, v, static_cast<size_t>(i));
    }
  }

  // Run jobs (optionally in parallel); results keep job order.
  std::vector<JobResult> results(job_list.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= job_list.size() || failed.load()) break;
      try {
        results[i] = run_job(ctx, job_list[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = e.what();
        failed.store(true);
        break;
      }
    }
  };
  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) throw std::runtime_error(failure);

  // Sequential write phase in job order.
  GenerateResult out;
  fs::create_directories(out_dir);
  for (size_t i = 0; i < results.size(); ++i) {
    JobResult& r = results[i];
    if (!r.ok) {
      if (!r.warning.empty()) out.warnings.push_back(r.warning);
      continue;
    }
    auto ensure_parent = [&](const std::string& rel) {
      fs::create_directories((fs::path(out_dir) / rel).parent_path());
      return (fs::path(out_dir) / rel).string();
    };
    for (const OutImage& f : r.images)
      png_io::write_image(f.img, ensure_parent(f.rel));
    for (const OutLabel& f : r.labels)
      png_io::write_label_map(f.map, ensure_parent(f.rel));
    for (const OutText& f : r.texts) spew(ensure_parent(f.rel), f.text);
    for (auto& e : r.entries) out.manifest.entries.push_back(std::move(e));
  }
  annotate::write_manifest(out.manifest, out_dir);
  return out;
}

// ---- verify --------------------------------------------------------------

std::vector<std::string> verify(const std::string& dataset_dir,
                                const SourceCollection* sources,
                                int min_manipulated_pixels) {
  std::vector<std::string> violations;
  annotate::DatasetManifest manifest;
  try {
    manifest = annotate::read_manifest(dataset_dir, true);
  } catch (const std::exception& e) {
    violations.push_back(std::string("manifest: ") + e.what());
    return violations;
  }

  std::map<std::string, std::string> source_paths;
  if (sources)
    for (const SourceEntry& e : sources->entries)
      source_paths[e.id] = e.image_path;

  for (const annotate::ManifestEntry& entry : manifest.entries) {
    std::string img_path, gt_path, meta_path;
    for (const std::string& rel : entry.paths) {
      if (rel.size() > 7 && rel.rfind("_gt.png") == rel.size() - 7)
        gt_path = rel;
      else if (rel.size() > 10 && rel.rfind("_meta.json") == rel.size() - 10)
        meta_path = rel;
      else if (rel.size() > 4 && rel.rfind(".png") == rel.size() - 4 &&
               (rel.size() <= 8 || rel.rfind("_gt2.png") != rel.size() - 8))
        img_path = rel;
    }
    auto abs = [&](const std::string& rel) {
      return (fs::path(dataset_dir) / rel).string();
    };
    if (img_path.empty()) {
      violations.push_back(entry.figure_id + ": no image in manifest paths");
      continue;
    }
    Raster img;
    try {
      img = png_io::read_image(abs(img_path));
    } catch (const std::exception& e) {
      violations.push_back(entry.figure_id + ": unreadable image: " + e.what());
      continue;
    }

    if (entry.taxonomy == "pristine") {
      if (!gt_path.empty())
        violations.push_back(entry.figure_id + ": pristine entry has a gt");
      if (sources && !meta_path.empty()) {
        try {
          annotate::ForgeryRecord rec = annotate::read_metadata(abs(meta_path));
          auto it = rec.source_refs.empty()
                        ? source_paths.end()
                        : source_paths.find(rec.source_refs[0]);
          if (it != source_paths.end() &&
              png_io::read_image(it->second) != img)
            violations.push_back(entry.figure_id +
                                 ": pristine pixels differ from source");
        } catch (const std::exception& e) {
          violations.push_back(entry.figure_id + ": " + e.what());
        }
      }
      continue;
    }

    if (gt_path.empty()) {
      violations.push_back(entry.figure_id + ": tampered entry without gt");
      continue;
    }
    LabelMap gt;
    try {
      gt = png_io::read_label_map(abs(gt_path));
    } catch (const std::exception& e) {
      violations.push_back(entry.figure_id + ": unreadable gt: " + e.what());
      continue;
    }
    if (gt.width != img.width || gt.height != img.height) {
      violations.push_back(entry.figure_id + ": gt/image dimension mismatch");
      continue;
    }
    if (static_cast<int>(gt.count_nonzero()) < min_manipulated_pixels)
      violations.push_back(entry.figure_id + ": fewer than " +
                           std::to_string(min_manipulated_pixels) +
                           " manipulated pixels");
    if (copy_move_like(entry.complexity, entry.taxonomy, entry.submodality) &&
        !has_paired_components(gt))
      violations.push_back(entry.figure_id +
                           ": duplication gt lacks paired components");
  }
  return violations;
}

// ---- evaluate ------------------------------------------------------------

EvaluateResult evaluate(const std::string& dataset_dir,
                        const std::string& detections_dir,
                        metrics::DetectionMode mode, int threshold,
                        bool pooled, int jobs) {
  annotate::DatasetManifest manifest =
      annotate::read_manifest(dataset_dir, true);

  struct Item {
    const annotate::ManifestEntry* entry;
    std::string gt_path;
  };
  std::vector<Item> items;
  for (const annotate::ManifestEntry& e : manifest.entries) {
    if (e.taxonomy == "pristine") continue;
    std::string gt_path;
    for (const std::string& rel : e.paths)
      if (rel.size() > 7 && rel.rfind("_gt.png") == rel.size() - 7)
        gt_path = rel;
    if (!gt_path.empty()) items.push_back({&e, gt_path});
  }

  EvaluateResult out;
  out.records.resize(items.size());
  std::vector<std::string> flag_slots(items.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      const annotate::ManifestEntry& e = *items[i].entry;
      LabelMap gt = png_io::read_label_map(
          (fs::path(dataset_dir) / items[i].gt_path).string());
      const std::string det =
          (fs::path(detections_dir) / (e.figure_id + ".png")).string();
      metrics::ScoreRecord rec;
      bool scored = false;
      if (fs::exists(det)) {
        try {
          if (png_io::probe_bit_depth(det) == 16) {
            rec = metrics::evaluate_figure(gt, png_io::read_label_map(det),
                                           mode);
          } else {
            rec = metrics::evaluate_figure(gt, png_io::read_gray(det), mode,
                                           threshold);
          }
          scored = true;
        } catch (const std::exception& ex) {
          flag_slots[i] = e.figure_id + ": unreadable detection (" +
                          ex.what() + "), scored as empty";
        }
      } else {
        flag_slots[i] = e.figure_id + ": missing detection, scored as empty";
      }
      if (!scored)
        rec = metrics::evaluate_figure(gt, LabelMap(gt.width, gt.height, 0),
                                       mode);
      rec.figure_id = e.figure_id;
      rec.modality = e.complexity + "/" + e.taxonomy;
      rec.submodality = e.submodality;
      rec.verbosity = e.verbosity;
      out.records[i] = rec;
    }
  };
  const int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const std::string& f : flag_slots)
    if (!f.empty()) out.flags.push_back(f);
  if (!out.records.empty())
    out.rows = metrics::aggregate_scores(out.records, pooled);
  return out;
}

}  // namespace sciforge::dataset
