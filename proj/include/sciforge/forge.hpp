#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sciforge/raster.hpp"

namespace sciforge::forge {

using raster::GeometricTransform;
using raster::LabelMap;
using raster::PixelSet;
using raster::Raster;

// Key/value record of the parameters an op actually used.
using Params = std::map<std::string, std::string>;

struct ForgeryOutput {
  Raster image;
  LabelMap gt;                       // primary manipulation map
  std::optional<LabelMap> gt_secondary;  // background-source map (cleaning)
  std::string modality;
  Params params;
  uint64_t seed = 0;
};

// Post-processing applied on top of a duplication (pasted copy only).
struct RetouchSpec {
  enum class Kind { Blur, Contrast } kind = Kind::Contrast;
  double sigma = 2.0;   // blur
  double gain = 1.0;    // contrast
  double bias = 0.0;
};

struct OverlapPair {
  Raster image_a, image_b;
  LabelMap gt_a, gt_b;  // overlap area marked with ID 1
  raster::Box crop_a, crop_b;
  std::string post_processed;  // "", "a" or "b"
  uint64_t seed = 0;
};

ForgeryOutput retouch_blur(const Raster& image, const LabelMap& objects,
                           const std::vector<uint16_t>& target_ids,
                           double sigma, uint64_t rng_seed);

ForgeryOutput retouch_contrast(const Raster& image, const LabelMap& objects,
                               const std::vector<uint16_t>& target_ids,
                               double gain, double bias, uint64_t rng_seed);

ForgeryOutput clean_brute_force(const Raster& image, const LabelMap& objects,
                                uint16_t target_id, int search_stride,
                                int feather_width, uint64_t rng_seed);

ForgeryOutput clean_inpaint(const Raster& image, const LabelMap& objects,
                            uint16_t target_id, int patch_radius);

ForgeryOutput copy_move(const Raster& image, const LabelMap& objects,
                        uint16_t source_id,
                        const std::vector<GeometricTransform>& transforms,
                        const std::optional<RetouchSpec>& post,
                        uint64_t rng_seed);

ForgeryOutput copy_move_random(const Raster& image, const LabelMap& objects,
                               uint64_t rng_seed, int search_stride = 4);

OverlapPair overlap_split(const Raster& image, int crop_w, int crop_h,
                          double overlap_fraction,
                          const std::optional<RetouchSpec>& post,
                          uint64_t rng_seed);

ForgeryOutput splice(const Raster& host, const LabelMap& host_objects,
                     const Raster& donor, const LabelMap& donor_objects,
                     uint16_t donor_id, uint64_t rng_seed);

// All stride-aligned offsets (dx, dy) that land every mask pixel on
// background (objects == 0). Ordered by placement position (y, x) ascending.
std::vector<raster::Pixel> background_placements(const LabelMap& objects,
                                                 const PixelSet& mask,
                                                 int stride);

// Extension hook: any function with this shape can be registered and then
// driven by the dataset builder like the built-in ops.
using ForgeryFn = std::function<ForgeryOutput(
    const Raster&, const LabelMap&, uint64_t seed)>;

// Built-in ops wrapped with the default dataset parameter ranges, keyed by
// submodality name (copy_move_translation, brute_force, blurring, ...).
const std::map<std::string, ForgeryFn>& default_registry();

}  // namespace sciforge::forge
