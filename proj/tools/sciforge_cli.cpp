// Command-line front end: ingest sources, generate a dataset, verify its
// invariants, evaluate detection maps, and plot score radars.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sciforge/annotate.hpp"
#include "sciforge/compound.hpp"
#include "sciforge/dataset.hpp"
#include "sciforge/metrics.hpp"
#include "sciforge/radar.hpp"

namespace fs = std::filesystem;
using namespace sciforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

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

std::vector<compound::Template> load_templates(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".json")
      files.push_back(de.path());
  std::sort(files.begin(), files.end());
  std::vector<compound::Template> templates;
  for (const fs::path& f : files)
    templates.push_back(compound::template_from_json(slurp(f.string())));
  return templates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scientific-figure forgery synthesis and evaluation toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a source collection");
  std::string in_src, in_masks, in_out;
  bool in_auto = false;
  ingest->add_option("--src", in_src, "Directory of source PNGs")->required();
  ingest->add_option("--masks", in_masks, "Directory of object-mask PNGs");
  ingest->add_flag("--auto-mask", in_auto,
                   "Segment maskless images automatically");
  ingest->add_option("--out", in_out, "Output directory")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset");
  std::string g_sources, g_config, g_templates, g_out;
  int g_jobs = 1;
  uint64_t g_seed = 0;
  bool g_seed_set = false;
  gen->add_option("--sources", g_sources, "Collection JSON from ingest")
      ->required();
  gen->add_option("--config", g_config, "Generation config JSON")->required();
  gen->add_option("--templates", g_templates,
                  "Directory of compound-figure template JSONs");
  gen->add_option("--out", g_out, "Dataset output directory")->required();
  gen->add_option("--jobs", g_jobs, "Worker threads");
  gen->add_option("--seed", g_seed, "Override the config seed")
      ->each([&](const std::string&) { g_seed_set = true; });

  // verify
  auto* ver = app.add_subcommand("verify", "Check dataset invariants");
  std::string v_dataset, v_sources;
  int v_min = 500;
  ver->add_option("--dataset", v_dataset, "Dataset directory")->required();
  ver->add_option("--sources", v_sources,
                  "Collection JSON for pristine comparison");
  ver->add_option("--min-pixels", v_min, "Minimum manipulated pixels");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score detection maps");
  std::string e_dataset, e_detections, e_out;
  int e_threshold = 100, e_jobs = 1;
  bool e_idless = false, e_pooled = false;
  ev->add_option("--dataset", e_dataset, "Dataset directory")->required();
  ev->add_option("--detections", e_detections,
                 "Directory of <figure_id>.png detection maps")
      ->required();
  ev->add_option("--out", e_out, "Output prefix (.csv and .json)")->required();
  ev->add_flag("--idless", e_idless, "Collapse detection IDs to one region");
  ev->add_option("--threshold", e_threshold,
                 "Binarization threshold for soft maps");
  ev->add_flag("--pooled", e_pooled,
               "Pool confusion counts instead of averaging per figure");
  ev->add_option("--jobs", e_jobs, "Worker threads");

  // radar
  auto* rad = app.add_subcommand("radar", "Radar chart from score CSVs");
  std::vector<std::string> r_csvs;
  std::string r_out;
  rad->add_option("--out", r_out, "Output SVG path")->required();
  rad->add_option("csv", r_csvs, "Score CSV files from evaluate")
      ->required()
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      fs::create_directories(in_out);
      std::vector<std::string> report;
      dataset::SourceCollection c =
          dataset::ingest(in_src, in_masks, in_auto, in_out, report);
      dataset::write_collection(c,
                                (fs::path(in_out) / "collection.json").string());
      for (const std::string& line : report) std::cerr << line << "\n";
      std::cout << "collected " << c.entries.size() << " sources -> "
                << (fs::path(in_out) / "collection.json").string() << "\n";
    } else if (*gen) {
      dataset::SourceCollection sources = dataset::read_collection(g_sources);
      dataset::GenerationConfig config =
          dataset::config_from_json(slurp(g_config));
      if (g_seed_set) config.seed = g_seed;
      std::vector<compound::Template> templates;
      if (!g_templates.empty()) templates = load_templates(g_templates);
      dataset::GenerateResult res =
          dataset::generate(sources, templates, config, g_out, g_jobs);
      for (const std::string& w : res.warnings) std::cerr << w << "\n";
      std::cout << "generated " << res.manifest.entries.size()
                << " figures under " << g_out << "\n";
    } else if (*ver) {
      dataset::SourceCollection sources;
      const dataset::SourceCollection* sp = nullptr;
      if (!v_sources.empty()) {
        sources = dataset::read_collection(v_sources);
        sp = &sources;
      }
      std::vector<std::string> violations =
          dataset::verify(v_dataset, sp, v_min);
      for (const std::string& v : violations) std::cerr << v << "\n";
      if (!violations.empty()) {
        std::cerr << violations.size() << " violation(s)\n";
        return kExitValidation;
      }
      std::cout << "ok\n";
    } else if (*ev) {
      dataset::EvaluateResult res = dataset::evaluate(
          e_dataset, e_detections,
          e_idless ? metrics::DetectionMode::IdLess : metrics::DetectionMode::Id,
          e_threshold, e_pooled, e_jobs);
      for (const std::string& f : res.flags) std::cerr << f << "\n";
      spew(e_out + ".csv", metrics::scores_to_csv(res.rows));
      spew(e_out + ".json", metrics::scores_to_json(res.rows));
      std::cout << metrics::scores_to_csv(res.rows);
    } else if (*rad) {
      std::vector<std::pair<std::string, std::string>> runs;
      for (const std::string& path : r_csvs)
        runs.emplace_back(fs::path(path).stem().string(), slurp(path));
      spew(r_out, radar::radar_svg_from_csv(runs));
      std::cout << "wrote " << r_out << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
