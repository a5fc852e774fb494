#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sciforge/forge.hpp"
#include "sciforge/rng.hpp"

using namespace sciforge;
using namespace sciforge::forge;
using raster::FlipAxis;
using raster::LabelMap;
using raster::Pixel;
using raster::PixelSet;
using raster::Raster;

namespace {

Raster random_raster(int w, int h, Rng& rng) {
  Raster img(w, h, 3, 0);
  for (auto& v : img.data) v = static_cast<uint8_t>(rng.uniform(256));
  return img;
}

// Source fixture: image with a couple of rectangular objects on background.
struct Fixture {
  Raster image;
  LabelMap objects;
};

Fixture blob_fixture(int w, int h, Rng& rng, int n_objects = 2) {
  Fixture f;
  f.image = Raster(w, h, 3, 0);
  for (auto& v : f.image.data)
    v = static_cast<uint8_t>(100 + rng.uniform(30));  // textured background
  f.objects = LabelMap(w, h, 0);
  for (int i = 0; i < n_objects; ++i) {
    int bw = 3 + static_cast<int>(rng.uniform(3));
    int bh = 3 + static_cast<int>(rng.uniform(3));
    int x0 = static_cast<int>(rng.uniform(std::max(1, w - bw)));
    int y0 = static_cast<int>(rng.uniform(std::max(1, h - bh)));
    for (int y = y0; y < y0 + bh && y < h; ++y)
      for (int x = x0; x < x0 + bw && x < w; ++x) {
        f.objects.at(x, y) = static_cast<uint16_t>(i + 1);
        for (int c = 0; c < 3; ++c)
          f.image.at(x, y, c) = static_cast<uint8_t>(200 + rng.uniform(40));
      }
  }
  return f;
}

// Locality check shared by all ops: untouched pixels are bit-equal.
void check_untouched(const Raster& before, const ForgeryOutput& out) {
  REQUIRE(out.gt.width == before.width);
  REQUIRE(out.gt.height == before.height);
  for (int y = 0; y < before.height; ++y)
    for (int x = 0; x < before.width; ++x) {
      if (out.gt.at(x, y) != 0) continue;
      if (out.gt_secondary && out.gt_secondary->at(x, y) != 0) continue;
      for (int c = 0; c < 3; ++c)
        CHECK(out.image.at(x, y, c) == before.at(x, y, c));
    }
}

}  // namespace

TEST_CASE("retouch blur: tiny sigma keeps pixels, gt still marks objects") {
  Rng rng(1);
  Fixture f = blob_fixture(20, 20, rng);
  // The kernel degenerates to the identity for a vanishing sigma.
  auto out = retouch_blur(f.image, f.objects, {1}, 1e-9, 42);
  CHECK(out.image == f.image);
  CHECK(out.gt.count_nonzero() == f.objects.pixels_with_id(1).size());
}

TEST_CASE("retouch blur: constant object is unchanged in value") {
  Raster img(16, 16, 3, 77);
  LabelMap obj(16, 16, 0);
  for (int y = 4; y < 10; ++y)
    for (int x = 4; x < 10; ++x) obj.at(x, y) = 1;
  auto out = retouch_blur(img, obj, {1}, 2.0, 1);
  CHECK(out.image == img);
}

TEST_CASE("retouch blur: non-target object pixels untouched") {
  Rng rng(2);
  Fixture f = blob_fixture(24, 24, rng, 2);
  auto out = retouch_blur(f.image, f.objects, {1}, 2.5, 7);
  for (const Pixel& p : f.objects.pixels_with_id(2))
    if (out.gt.at(p.x, p.y) == 0)
      for (int c = 0; c < 3; ++c)
        CHECK(out.image.at(p.x, p.y, c) == f.image.at(p.x, p.y, c));
  check_untouched(f.image, out);
}

TEST_CASE("retouch blur: unknown id errors") {
  Rng rng(3);
  Fixture f = blob_fixture(12, 12, rng);
  CHECK_THROWS(retouch_blur(f.image, f.objects, {99}, 2.0, 0));
}

TEST_CASE("retouch contrast: identity, clamp, arithmetic") {
  Rng rng(4);
  Fixture f = blob_fixture(16, 16, rng, 1);
  auto ident = retouch_contrast(f.image, f.objects, {1}, 1.0, 0.0, 0);
  CHECK(ident.image == f.image);

  auto sat = retouch_contrast(f.image, f.objects, {1}, 1.0, 255.0, 0);
  for (const Pixel& p : f.objects.pixels_with_id(1))
    for (int c = 0; c < 3; ++c) CHECK(sat.image.at(p.x, p.y, c) == 255);

  Raster img(4, 4, 3, 100);
  LabelMap obj(4, 4, 0);
  obj.at(1, 1) = 1;
  auto doubled = retouch_contrast(img, obj, {1}, 2.0, 0.0, 0);
  CHECK(doubled.image.at(1, 1, 0) == 200);
}

TEST_CASE("clean brute force: uniform background becomes the uniform color") {
  // 8x8 uniform background with one bright 2x2 object.
  Raster img(8, 8, 3, 50);
  LabelMap obj(8, 8, 0);
  for (int y = 1; y <= 2; ++y)
    for (int x = 1; x <= 2; ++x) {
      obj.at(x, y) = 1;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 250;
    }
  auto out = clean_brute_force(img, obj, 1, 1, 0, 9);
  for (const Pixel& p : obj.pixels_with_id(1))
    for (int c = 0; c < 3; ++c) CHECK(out.image.at(p.x, p.y, c) == 50);
  // All placements tie at distance 0; the first in scan order wins. The
  // first 2x2 window free of the object starts at (3,0): offset (2,-1).
  CHECK(out.params.at("offset_dx") == "2");
  CHECK(out.params.at("offset_dy") == "-1");
  REQUIRE(out.gt_secondary.has_value());
  CHECK(out.gt_secondary->count_nonzero() == 4);
  check_untouched(img, out);
}

TEST_CASE("clean brute force: chosen placement minimizes histogram distance") {
  // Exhaustive re-scan oracle on a small textured image, stride 1.
  Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    Fixture f = blob_fixture(16 + static_cast<int>(rng.uniform(17)),
                             16 + static_cast<int>(rng.uniform(17)), rng, 1);
    PixelSet mask = f.objects.pixels_with_id(1);
    ForgeryOutput out;
    try {
      out = clean_brute_force(f.image, f.objects, 1, 1, 2, trial);
    } catch (const std::runtime_error&) {
      continue;  // no placement on this layout
    }
    auto offsets = background_placements(f.objects, mask, 1);
    auto th = raster::color_histogram(f.image, mask);
    double best = std::numeric_limits<double>::infinity();
    for (const Pixel& off : offsets) {
      PixelSet cand;
      for (const Pixel& p : mask) cand.push_back({p.x + off.x, p.y + off.y});
      best = std::min(best,
                      raster::histogram_distance(
                          raster::color_histogram(f.image, cand), th));
    }
    CHECK(std::stod(out.params.at("histogram_distance")) ==
          doctest::Approx(best));
  }
}

TEST_CASE("clean brute force: target covering everything errors") {
  Raster img(6, 6, 3, 10);
  LabelMap obj(6, 6, 1);
  CHECK_THROWS_WITH(clean_brute_force(img, obj, 1, 1, 0, 0),
                    "no background fits object shape");
}

TEST_CASE("clean inpaint: uniform image stays uniform") {
  Raster img(20, 20, 3, 90);
  LabelMap obj(20, 20, 0);
  for (int y = 8; y < 12; ++y)
    for (int x = 8; x < 12; ++x) obj.at(x, y) = 1;
  auto out = clean_inpaint(img, obj, 1, 3);
  CHECK(out.image == img);
  CHECK(out.gt.count_nonzero() == 16);
}

TEST_CASE("clean inpaint: single pixel hole takes the uniform color") {
  Raster img(8, 8, 3, 33);
  LabelMap obj(8, 8, 0);
  obj.at(4, 4) = 1;
  img.at(4, 4, 0) = 200;  // garbage value to overwrite
  auto out = clean_inpaint(img, obj, 1, 1);
  for (int c = 0; c < 3; ++c) CHECK(out.image.at(4, 4, c) == 33);
}

TEST_CASE("clean inpaint: two-tone image fills each side with its color") {
  const int n = 16;
  Raster img(n, n, 3, 0);
  for (int y = 0; y < n; ++y)
    for (int x = n / 2; x < n; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 255;
  LabelMap obj(n, n, 0);
  // Hole straddling the middle, away from the outer border.
  for (int y = 6; y < 10; ++y)
    for (int x = 5; x < 11; ++x) obj.at(x, y) = 1;
  auto out = clean_inpaint(img, obj, 1, 2);
  int ok = 0, total = 0;
  for (int y = 6; y < 10; ++y)
    for (int x = 5; x < 11; ++x) {
      ++total;
      uint8_t expected = x < n / 2 ? 0 : 255;
      if (out.image.at(x, y, 0) == expected) ++ok;
    }
  CHECK(static_cast<double>(ok) / total >= 0.95);
}

TEST_CASE("copy move: translation gives two components and exact pixels") {
  Rng rng(6);
  Raster img = random_raster(24, 24, rng);
  LabelMap obj(24, 24, 0);
  for (int y = 3; y < 8; ++y)
    for (int x = 2; x < 7; ++x) obj.at(x, y) = 1;
  const int dx = 12;
  auto out = copy_move(img, obj, 1, {GeometricTransform::translation(dx, 0)},
                       std::nullopt, 3);
  for (const Pixel& p : obj.pixels_with_id(1))
    for (int c = 0; c < 3; ++c)
      CHECK(out.image.at(p.x + dx, p.y, c) == img.at(p.x, p.y, c));
  auto comps = raster::connected_components(out.gt, 8);
  CHECK(comps.size() == 2);
  CHECK(comps[0].region_id == comps[1].region_id);
  check_untouched(img, out);
}

TEST_CASE("copy move: flip then translation equals mirrored source") {
  Rng rng(7);
  Raster img = random_raster(20, 20, rng);
  LabelMap obj(20, 20, 0);
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 7; ++x) obj.at(x, y) = 1;
  auto out = copy_move(img, obj, 1,
                       {GeometricTransform::flip(FlipAxis::Horizontal),
                        GeometricTransform::translation(10, 8)},
                       std::nullopt, 1);
  // Independently mirrored patch: column x maps to 2+6-x within the bbox.
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 7; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(out.image.at(x + 10, y + 8, c) == img.at(2 + 6 - x, y, c));
}

TEST_CASE("copy move: scaling alone errors") {
  Rng rng(8);
  Fixture f = blob_fixture(16, 16, rng, 1);
  CHECK_THROWS_WITH(copy_move(f.image, f.objects, 1,
                              {GeometricTransform::scaling(1.5)}, std::nullopt, 0),
                    "scaling must be combined");
}

TEST_CASE("copy move: transforms must be nonempty") {
  Rng rng(9);
  Fixture f = blob_fixture(16, 16, rng, 1);
  CHECK_THROWS(copy_move(f.image, f.objects, 1, {}, std::nullopt, 0));
}

TEST_CASE("copy move random: paste is lossless and deterministic") {
  Raster img(32, 32, 3, 60);
  LabelMap obj(32, 32, 0);
  obj.at(2, 2) = 1;
  obj.at(3, 2) = 1;
  obj.at(2, 3) = 1;
  obj.at(3, 3) = 1;
  for (const Pixel& p : obj.pixels_with_id(1))
    for (int c = 0; c < 3; ++c) img.at(p.x, p.y, c) = 222;
  auto a = copy_move_random(img, obj, 77);
  auto b = copy_move_random(img, obj, 77);
  CHECK(a.image == b.image);
  CHECK(a.gt == b.gt);
  CHECK(a.gt.count_nonzero() == 8);  // 4 source + 4 pasted pixels
  for (const Pixel& p : a.gt.nonzero_pixels())
    for (int c = 0; c < 3; ++c) CHECK(a.image.at(p.x, p.y, c) == 222);
  check_untouched(img, a);
}

TEST_CASE("copy move random: empty object map errors") {
  Raster img(8, 8, 3, 0);
  LabelMap obj(8, 8, 0);
  CHECK_THROWS(copy_move_random(img, obj, 0));
}

TEST_CASE("overlap split: without post the shared region is bit-identical") {
  Rng rng(10);
  Raster img = random_raster(40, 30, rng);
  auto pair = overlap_split(img, 16, 12, 0.5, std::nullopt, 5);
  CHECK(pair.crop_a != pair.crop_b);
  CHECK(pair.gt_a.count_nonzero() == pair.gt_b.count_nonzero());
  auto a_px = pair.gt_a.nonzero_pixels();
  auto b_px = pair.gt_b.nonzero_pixels();
  REQUIRE(a_px.size() == b_px.size());
  for (size_t i = 0; i < a_px.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(pair.image_a.at(a_px[i].x, a_px[i].y, c) ==
            pair.image_b.at(b_px[i].x, b_px[i].y, c));
}

TEST_CASE("overlap split: bias post shifts overlap pixels by the clamped bias") {
  Raster img(40, 30, 3, 100);
  RetouchSpec post;
  post.kind = RetouchSpec::Kind::Contrast;
  post.gain = 1.0;
  post.bias = 30.0;
  auto pair = overlap_split(img, 16, 12, 0.5, post, 6);
  auto a_px = pair.gt_a.nonzero_pixels();
  auto b_px = pair.gt_b.nonzero_pixels();
  for (size_t i = 0; i < a_px.size(); ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(pair.image_a.at(a_px[i].x, a_px[i].y, c) ==
            pair.image_b.at(b_px[i].x, b_px[i].y, c) + 30);
  CHECK(pair.post_processed == "a");
}

TEST_CASE("overlap split: infeasible geometry errors") {
  Raster img(16, 16, 3, 0);
  CHECK_THROWS(overlap_split(img, 16, 16, 0.5, std::nullopt, 0));
}

TEST_CASE("splice: hard paste preserves donor pixels and mask area") {
  Rng rng(11);
  Raster host(32, 32, 3, 80);
  LabelMap host_obj(32, 32, 0);
  Fixture donor = blob_fixture(20, 20, rng, 1);
  auto out = splice(host, host_obj, donor.image, donor.objects, 1, 13);
  PixelSet mask = donor.objects.pixels_with_id(1);
  CHECK(out.gt.count_nonzero() == mask.size());
  int dx = std::stoi(out.params.at("offset_dx"));
  int dy = std::stoi(out.params.at("offset_dy"));
  for (const Pixel& p : mask)
    for (int c = 0; c < 3; ++c)
      CHECK(out.image.at(p.x + dx, p.y + dy, c) ==
            donor.image.at(p.x, p.y, c));
  auto again = splice(host, host_obj, donor.image, donor.objects, 1, 13);
  CHECK(again.image == out.image);
  check_untouched(host, out);
}

TEST_CASE("forgery locality: all registry ops leave pristine pixels intact") {
  Rng rng(12);
  for (const auto& [name, fn] : default_registry()) {
    for (int trial = 0; trial < 5; ++trial) {
      Fixture f = blob_fixture(28, 28, rng, 2);
      ForgeryOutput out;
      try {
        out = fn(f.image, f.objects, 1000 + trial);
      } catch (const std::exception&) {
        continue;  // layout without a valid placement
      }
      INFO("op = " << name);
      check_untouched(f.image, out);
    }
  }
}

TEST_CASE("determinism: identical inputs and seed give identical output") {
  Rng rng(13);
  Fixture f = blob_fixture(28, 28, rng, 2);
  for (const auto& [name, fn] : default_registry()) {
    ForgeryOutput a, b;
    try {
      a = fn(f.image, f.objects, 5);
      b = fn(f.image, f.objects, 5);
    } catch (const std::exception&) {
      continue;
    }
    INFO("op = " << name);
    CHECK(a.image == b.image);
    CHECK(a.gt == b.gt);
    CHECK(a.params == b.params);
  }
}
