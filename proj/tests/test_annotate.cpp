#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sciforge/annotate.hpp"

using namespace sciforge;
using namespace sciforge::annotate;
using raster::LabelMap;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sciforge_annotate_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

ForgeryRecord sample_record() {
  ForgeryRecord rec;
  rec.figure_id = "fig_0001";
  rec.modality = "duplication";
  rec.submodality = "copy_move_flip";
  rec.source_refs = {"src_42"};
  rec.method_args = {{"axis", "horizontal"}, {"source_id", "1"}};
  rec.verbosity = 0;
  rec.seed = 99;
  rec.split = "train";
  rec.gt_files = {"fig_0001_gt.png"};
  return rec;
}

}  // namespace

TEST_CASE("ground truth png: round trip including boundary ids") {
  TempDir tmp;
  LabelMap gt(17, 9, 0);
  gt.at(0, 0) = 1;
  gt.at(16, 8) = 65535;
  gt.at(5, 5) = 1234;
  write_ground_truth(gt, tmp.file("gt.png"));
  CHECK(read_ground_truth(tmp.file("gt.png")) == gt);

  LabelMap zero(4, 4, 0);
  write_ground_truth(zero, tmp.file("zero.png"));
  CHECK(read_ground_truth(tmp.file("zero.png")) == zero);

  CHECK_THROWS(write_ground_truth(gt, "/nonexistent_dir_xyz/gt.png"));
}

TEST_CASE("metadata: round trip and byte stability") {
  TempDir tmp;
  ForgeryRecord rec = sample_record();
  write_metadata(rec, tmp.file("m.json"), false);
  ForgeryRecord back = read_metadata(tmp.file("m.json"));
  CHECK(back.figure_id == rec.figure_id);
  CHECK(back.submodality == rec.submodality);
  CHECK(back.source_refs == rec.source_refs);
  CHECK(back.method_args == rec.method_args);
  CHECK(back.seed == rec.seed);
  CHECK(back.gt_files == rec.gt_files);

  write_metadata(back, tmp.file("m2.json"), false);
  std::ifstream a(tmp.file("m.json")), b(tmp.file("m2.json"));
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  CHECK(sa.back() == '\n');
}

TEST_CASE("metadata: invariant violations rejected before writing") {
  TempDir tmp;
  ForgeryRecord rec = sample_record();

  ForgeryRecord no_src = rec;
  no_src.source_refs.clear();
  CHECK_THROWS(write_metadata(no_src, tmp.file("x.json"), false));

  ForgeryRecord pristine_with_gt = rec;
  CHECK_THROWS(write_metadata(pristine_with_gt, tmp.file("x.json"), true));

  ForgeryRecord tampered_no_gt = rec;
  tampered_no_gt.gt_files.clear();
  CHECK_THROWS(write_metadata(tampered_no_gt, tmp.file("x.json"), false));

  ForgeryRecord verbose_no_panels = rec;
  verbose_no_panels.verbosity = 2;
  CHECK_THROWS(write_metadata(verbose_no_panels, tmp.file("x.json"), false));

  ForgeryRecord panels_no_verbosity = rec;
  panels_no_verbosity.panel_locations = {{0, 0, 10, 10}};
  CHECK_THROWS(write_metadata(panels_no_verbosity, tmp.file("x.json"), false));

  // Nothing was written by any rejected call.
  CHECK(!fs::exists(tmp.file("x.json")));

  ForgeryRecord compound_ok = rec;
  compound_ok.verbosity = 2;
  compound_ok.panel_locations = {{0, 0, 10, 10}, {12, 0, 22, 10}};
  write_metadata(compound_ok, tmp.file("ok.json"), false);
  CHECK(read_metadata(tmp.file("ok.json")).panel_locations.size() == 2);
}

TEST_CASE("manifest: round trip, sorting and duplicate detection") {
  TempDir tmp;
  DatasetManifest m;
  m.entries.push_back({"b_fig", "train", "simple", "duplication",
                       "copy_move_translation", 0, {}});
  m.entries.push_back({"a_fig", "test", "compound", "cleaning",
                       "inpainting", 2, {}});
  m.entries.push_back({"c_fig", "train", "simple", "pristine", "", 0, {}});
  write_manifest(m, tmp.path.string());
  DatasetManifest back = read_manifest(tmp.path.string());
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[0].figure_id == "a_fig");
  CHECK(back.entries[1].figure_id == "b_fig");
  CHECK(back.entries[2].figure_id == "c_fig");
  CHECK(back.entries[0].verbosity == 2);

  DatasetManifest dup = m;
  dup.entries.push_back(m.entries[0]);
  CHECK_THROWS(write_manifest(dup, tmp.path.string()));

  DatasetManifest empty;
  write_manifest(empty, tmp.path.string());
  CHECK(read_manifest(tmp.path.string()).entries.empty());
}

TEST_CASE("manifest: missing referenced path fails unless skipped") {
  TempDir tmp;
  DatasetManifest m;
  m.entries.push_back({"f1", "train", "simple", "pristine", "", 0,
                       {"does_not_exist.png"}});
  write_manifest(m, tmp.path.string());
  CHECK_THROWS(read_manifest(tmp.path.string(), true));
  CHECK(read_manifest(tmp.path.string(), false).entries.size() == 1);

  // Once the file exists the check passes.
  std::ofstream(tmp.file("does_not_exist.png")) << "x";
  CHECK(read_manifest(tmp.path.string(), true).entries.size() == 1);
}
