#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "sciforge/compound.hpp"
#include "sciforge/rng.hpp"

using namespace sciforge;
using namespace sciforge::compound;
using raster::LabelMap;
using raster::Pixel;
using raster::Raster;

namespace {

SourceImage make_source(int w, int h, uint64_t seed, int n_objects = 2) {
  Rng rng(seed);
  SourceImage s;
  s.ref = "src_" + std::to_string(seed);
  s.image = Raster(w, h, 3, 0);
  for (auto& v : s.image.data) v = static_cast<uint8_t>(100 + rng.uniform(40));
  s.objects = LabelMap(w, h, 0);
  for (int i = 0; i < n_objects; ++i) {
    int bw = 4 + static_cast<int>(rng.uniform(4));
    int bh = 4 + static_cast<int>(rng.uniform(4));
    int x0 = 2 + static_cast<int>(rng.uniform(std::max(1, w - bw - 4)));
    int y0 = 2 + static_cast<int>(rng.uniform(std::max(1, h - bh - 4)));
    for (int y = y0; y < y0 + bh; ++y)
      for (int x = x0; x < x0 + bw; ++x) {
        s.objects.at(x, y) = static_cast<uint16_t>(i + 1);
        for (int c = 0; c < 3; ++c)
          s.image.at(x, y, c) = static_cast<uint8_t>(190 + rng.uniform(50));
      }
  }
  return s;
}

const char* kTwoPanel = R"({
  "canvas": [140, 80],
  "panels": [
    {"rect": [4, 10, 67, 73], "kind": "photo"},
    {"rect": [74, 10, 137, 73], "kind": "photo"}
  ]
})";

const char* kThreePanel = R"({
  "canvas": [220, 90],
  "panels": [
    {"rect": [4, 12, 67, 75], "kind": "photo"},
    {"rect": [74, 12, 137, 75], "kind": "photo"},
    {"rect": [144, 12, 215, 75], "kind": "graph"}
  ]
})";

Raster panel_content(const Raster& canvas, const raster::Box& r) {
  Raster out(r.width(), r.height(), 3, 0);
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = canvas.at(r.x0 + x, r.y0 + y, c);
  return out;
}

}  // namespace

TEST_CASE("template json: round trip and validation") {
  Template t = template_from_json(kThreePanel);
  CHECK(t.canvas_w == 220);
  CHECK(t.panels.size() == 3);
  CHECK(t.panels[2].kind == Panel::Kind::Graph);
  Template back = template_from_json(template_to_json(t));
  CHECK(back.panels.size() == t.panels.size());
  CHECK(back.panels[1].rect == t.panels[1].rect);

  CHECK_THROWS(template_from_json("{"));
  CHECK_THROWS(template_from_json(R"({"canvas":[100],"panels":[]})"));
  // Panel outside canvas.
  CHECK_THROWS(template_from_json(
      R"({"canvas":[50,50],"panels":[{"rect":[0,0,60,10],"kind":"photo"}]})"));
  // Overlapping panels.
  CHECK_THROWS(template_from_json(
      R"({"canvas":[50,50],"panels":[{"rect":[0,0,20,20],"kind":"photo"},
          {"rect":[10,10,30,30],"kind":"photo"}]})"));
  // No photo panel.
  CHECK_THROWS(template_from_json(
      R"({"canvas":[50,50],"panels":[{"rect":[0,0,20,20],"kind":"graph"}]})"));
}

TEST_CASE("select_template: exact and log-ratio matches") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  // Panels are 64x64 -> aspect 1. An exact-aspect source picks panel 0.
  auto c = select_template(ts, 1.0, 0.25);
  CHECK(c.template_index == 0);
  CHECK(c.panel_index == 0);

  // Source 2:1 against panels 1:1 and ~2.05:1 picks the 2.05 panel.
  Template t2 = template_from_json(R"({
    "canvas": [300, 120],
    "panels": [
      {"rect": [0, 0, 63, 63], "kind": "photo"},
      {"rect": [70, 0, 110, 19], "kind": "photo"}
    ]})");  // 41x20 = 2.05:1
  auto c2 = select_template({t2}, 2.0, 0.25);
  CHECK(c2.panel_index == 1);

  // tol 0 without an exact match rejects.
  CHECK_THROWS_WITH(select_template(ts, 1.37, 0.0), "no fitting template");
  CHECK_THROWS(select_template({}, 1.0, 0.25));
}

TEST_CASE("fake graph: determinism, seed sensitivity, white background") {
  Raster a = generate_fake_graph(64, 48, 9);
  Raster b = generate_fake_graph(64, 48, 9);
  CHECK(a == b);
  Raster c = generate_fake_graph(64, 48, 10);
  CHECK(a != c);

  size_t white = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      if (a.at(x, y, 0) == 255 && a.at(x, y, 1) == 255 && a.at(x, y, 2) == 255)
        ++white;
  CHECK(white > static_cast<size_t>(a.width) * a.height / 2);

  CHECK_THROWS(generate_fake_graph(16, 48, 0));
}

TEST_CASE("intra: gt confined to the forged panel, content reproducible") {
  std::vector<Template> ts = {template_from_json(kThreePanel)};
  SourceImage src = make_source(64, 64, 1);
  std::vector<SourceImage> pool = {make_source(60, 60, 2, 0)};
  CompoundFigure fig =
      build_compound_intra(ts, src, "copy_move_translation", pool, 0, 5);

  CHECK(fig.image.width == 220);
  CHECK(fig.image.height == 90);
  CHECK(fig.verbosity == 0);
  CHECK(fig.text_boxes.empty());

  // The forged panel is one of the photo panels; gt stays inside it.
  raster::Box forged;
  for (const auto& p : fig.panel_layout)
    if (p.role == "forged") forged = p.rect;
  REQUIRE(!forged.empty());
  for (const Pixel& p : fig.gt.nonzero_pixels()) {
    CHECK(p.x >= forged.x0);
    CHECK(p.x <= forged.x1);
    CHECK(p.y >= forged.y0);
    CHECK(p.y <= forged.y1);
  }
  CHECK(fig.gt.count_nonzero() > 0);

  // Panel content equals the forgery output resized independently.
  auto fo = forge::default_registry().at("copy_move_translation")(
      src.image, src.objects, Rng::derive(5, 1));
  Raster expect =
      raster::resize_bilinear(fo.image, forged.width(), forged.height());
  CHECK(panel_content(fig.image, forged) == expect);

  // Determinism.
  CompoundFigure again =
      build_compound_intra(ts, src, "copy_move_translation", pool, 0, 5);
  CHECK(again.image == fig.image);
  CHECK(again.gt == fig.gt);
}

TEST_CASE("intra: single-panel template degenerates to a bordered figure") {
  Template t = template_from_json(
      R"({"canvas":[72,72],"panels":[{"rect":[4,4,67,67],"kind":"photo"}]})");
  SourceImage src = make_source(64, 64, 3);
  CompoundFigure fig = build_compound_intra({t}, src, "contrast", {}, 0, 8);
  CHECK(fig.panel_layout.size() == 1);
  CHECK(fig.panel_layout[0].role == "forged");
  CHECK(fig.gt.count_nonzero() > 0);
}

TEST_CASE("intra: unknown submodality and unfittable aspect are rejected") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage src = make_source(64, 64, 4);
  CHECK_THROWS(build_compound_intra(ts, src, "no_such_op", {}, 0, 0));
  SourceImage wide = make_source(200, 20, 4);
  CHECK_THROWS_WITH(build_compound_intra(ts, wide, "contrast", {}, 0, 0),
                    "no fitting template");
}

TEST_CASE("letters: counts, nesting and gt immutability") {
  std::vector<Template> ts = {template_from_json(kThreePanel)};
  SourceImage src = make_source(64, 64, 1);

  CompoundFigure l1 = build_compound_intra(ts, src, "contrast", {}, 1, 6);
  CompoundFigure l2 = build_compound_intra(ts, src, "contrast", {}, 2, 6);
  CompoundFigure l3 = build_compound_intra(ts, src, "contrast", {}, 3, 6);

  CHECK(l1.text_boxes.size() == 3);   // one tag per panel
  CHECK(l2.text_boxes.size() == 6);   // + one word per panel
  CHECK(l3.text_boxes.size() == 9);   // + one in-panel letter

  // Nesting: the boxes of level k are a prefix-superset of level k-1.
  for (size_t i = 0; i < l1.text_boxes.size(); ++i) {
    CHECK(l2.text_boxes[i].rect == l1.text_boxes[i].rect);
    CHECK(l2.text_boxes[i].text == l1.text_boxes[i].text);
  }
  for (size_t i = 0; i < l2.text_boxes.size(); ++i) {
    CHECK(l3.text_boxes[i].rect == l2.text_boxes[i].rect);
    CHECK(l3.text_boxes[i].text == l2.text_boxes[i].text);
  }

  // Text overlay never alters the ground truth.
  CompoundFigure l0 = build_compound_intra(ts, src, "contrast", {}, 0, 6);
  CHECK(l0.gt == l1.gt);
  CHECK(l0.gt == l3.gt);

  // Level-1 tags follow panel order.
  CHECK(l1.text_boxes[0].text == "(a)");
  CHECK(l1.text_boxes[1].text == "(b)");
  CHECK(l1.text_boxes[2].text == "(c)");
}

TEST_CASE("inter: pure duplication fills both panels identically") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage src = make_source(64, 64, 1);
  CompoundFigure fig =
      build_compound_inter(ts, {src}, InterMode::PanelDuplication,
                           PanelTransform::None, std::nullopt, {}, 0, 11);
  REQUIRE(fig.panel_layout.size() == 2);
  Raster a = panel_content(fig.image, fig.panel_layout[0].rect);
  Raster b = panel_content(fig.image, fig.panel_layout[1].rect);
  CHECK(a == b);

  auto comps = raster::connected_components(fig.gt, 8);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].region_id == 1);
  CHECK(comps[1].region_id == 1);
  CHECK(comps[0].area == 64 * 64);
}

TEST_CASE("inter: rotation180 panel is the exact half-turn of its twin") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage src = make_source(48, 48, 2);
  CompoundFigure fig =
      build_compound_inter(ts, {src}, InterMode::PanelDuplication,
                           PanelTransform::Rotation180, std::nullopt, {}, 0, 4);
  Raster a = panel_content(fig.image, fig.panel_layout[0].rect);
  Raster b = panel_content(fig.image, fig.panel_layout[1].rect);
  Raster expect(a.width, a.height, 3, 0);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      for (int c = 0; c < 3; ++c)
        expect.at(x, y, c) = a.at(a.width - 1 - x, a.height - 1 - y, c);
  CHECK(b == expect);
}

TEST_CASE("inter: flip panel mirrors its twin") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage src = make_source(48, 48, 7);
  CompoundFigure fig =
      build_compound_inter(ts, {src}, InterMode::PanelDuplication,
                           PanelTransform::Flip, std::nullopt, {}, 0, 4);
  Raster a = panel_content(fig.image, fig.panel_layout[0].rect);
  Raster b = panel_content(fig.image, fig.panel_layout[1].rect);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(b.at(x, y, c) == a.at(a.width - 1 - x, y, c));
}

TEST_CASE("inter: incompatible template is rejected") {
  // Two photo panels of different sizes: no duplication pair.
  Template t = template_from_json(R"({
    "canvas": [200, 100],
    "panels": [
      {"rect": [0, 0, 63, 63], "kind": "photo"},
      {"rect": [70, 0, 149, 39], "kind": "photo"}
    ]})");
  SourceImage src = make_source(64, 64, 1);
  CHECK_THROWS_WITH(
      build_compound_inter({t}, {src}, InterMode::PanelDuplication,
                           PanelTransform::None, std::nullopt, {}, 0, 0),
      "fewer than 2 compatible panels");
}

TEST_CASE("inter: splicing marks the object in both panels") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage donor = make_source(64, 64, 5, 1);
  SourceImage host = make_source(64, 64, 6, 0);
  CompoundFigure fig =
      build_compound_inter(ts, {donor, host}, InterMode::Splicing,
                           PanelTransform::None, std::nullopt, {}, 0, 21);
  auto comps = raster::connected_components(fig.gt, 8);
  REQUIRE(comps.size() == 2);
  // One component per involved panel.
  std::set<int> panels;
  for (const auto& comp : comps)
    for (size_t i = 0; i < fig.panel_layout.size(); ++i) {
      const auto& r = fig.panel_layout[i].rect;
      if (comp.bbox.x0 >= r.x0 && comp.bbox.x1 <= r.x1 &&
          comp.bbox.y0 >= r.y0 && comp.bbox.y1 <= r.y1)
        panels.insert(static_cast<int>(i));
    }
  CHECK(panels.size() == 2);
  CHECK(comps[0].area == comps[1].area);
}

TEST_CASE("inter: overlap panels share identical overlap content") {
  std::vector<Template> ts = {template_from_json(kTwoPanel)};
  SourceImage src = make_source(96, 96, 8, 0);
  CompoundFigure fig =
      build_compound_inter(ts, {src}, InterMode::Overlap, PanelTransform::None,
                           std::nullopt, {}, 0, 31);
  auto comps = raster::connected_components(fig.gt, 8);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].area == comps[1].area);
  // The marked pixels carry the same content in both panels, in order.
  std::vector<Pixel> pa = comps[0].pixels, pb = comps[1].pixels;
  for (size_t i = 0; i < pa.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(fig.image.at(pa[i].x, pa[i].y, c) ==
            fig.image.at(pb[i].x, pb[i].y, c));
}

TEST_CASE("inter: determinism under a fixed seed") {
  std::vector<Template> ts = {template_from_json(kThreePanel)};
  SourceImage src = make_source(64, 64, 1);
  auto a = build_compound_inter(ts, {src}, InterMode::PanelDuplication,
                                PanelTransform::Flip, std::nullopt, {}, 3, 77);
  auto b = build_compound_inter(ts, {src}, InterMode::PanelDuplication,
                                PanelTransform::Flip, std::nullopt, {}, 3, 77);
  CHECK(a.image == b.image);
  CHECK(a.gt == b.gt);
  CHECK(a.text_boxes.size() == b.text_boxes.size());
}

TEST_CASE("nearest resize keeps gt component count for scales >= 0.25") {
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    LabelMap gt(40, 40, 0);
    // A few well-separated blocks.
    int n = 2 + static_cast<int>(rng.uniform(3));
    for (int i = 0; i < n; ++i) {
      int x0 = (i % 3) * 13 + 1, y0 = (i / 3) * 13 + 1;
      for (int y = y0; y < y0 + 8; ++y)
        for (int x = x0; x < x0 + 8; ++x)
          gt.at(x, y) = static_cast<uint16_t>(1 + i % 2);
    }
    size_t before = raster::connected_components(gt, 8).size();
    double scale = 0.25 + rng.uniform01() * 1.75;
    LabelMap resized = raster::resize_nearest(
        gt, std::max(1, static_cast<int>(40 * scale)),
        std::max(1, static_cast<int>(40 * scale)));
    CHECK(raster::connected_components(resized, 8).size() == before);
  }
}
