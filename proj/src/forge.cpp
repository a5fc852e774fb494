#include "sciforge/forge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sciforge/rng.hpp"

namespace sciforge::forge {

namespace {

using raster::Box;
using raster::Pixel;

void require_ids(const LabelMap& objects,
                 const std::vector<uint16_t>& target_ids) {
  if (target_ids.empty()) throw std::invalid_argument("no target ids");
  for (uint16_t id : target_ids) {
    if (id == 0 || objects.pixels_with_id(id).empty())
      throw std::invalid_argument("unknown object id " + std::to_string(id));
  }
}

// Gaussian blur evaluated only at region pixels, sampling the untouched
// input with edge clamping. Kernel radius = ceil(3 sigma).
void blur_region(Raster& image, const PixelSet& region, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  if (radius < 1) return;
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const Raster src = image;
  for (const Pixel& p : region) {
    for (int c = 0; c < image.channels; ++c) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        int y = std::clamp(p.y + dy, 0, src.height - 1);
        double row = 0.0;
        for (int dx = -radius; dx <= radius; ++dx) {
          int x = std::clamp(p.x + dx, 0, src.width - 1);
          row += kernel[dx + radius] * src.at(x, y, c);
        }
        acc += kernel[dy + radius] * row;
      }
      image.at(p.x, p.y, c) =
          static_cast<uint8_t>(std::clamp(std::lround(acc), 0l, 255l));
    }
  }
}

void contrast_region(Raster& image, const PixelSet& region, double gain,
                     double bias) {
  for (const Pixel& p : region)
    for (int c = 0; c < image.channels; ++c) {
      double v = gain * image.at(p.x, p.y, c) + bias;
      image.at(p.x, p.y, c) =
          static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
    }
}

void apply_post(Raster& image, const PixelSet& region, const RetouchSpec& post,
                Params& params) {
  if (post.kind == RetouchSpec::Kind::Blur) {
    blur_region(image, region, post.sigma);
    params["post"] = "blur";
    params["post_sigma"] = std::to_string(post.sigma);
  } else {
    contrast_region(image, region, post.gain, post.bias);
    params["post"] = "contrast";
    params["post_gain"] = std::to_string(post.gain);
    params["post_bias"] = std::to_string(post.bias);
  }
}

LabelMap gt_for_targets(const LabelMap& objects,
                        const std::vector<uint16_t>& target_ids) {
  LabelMap gt(objects.width, objects.height, 0);
  uint16_t next = 1;
  for (uint16_t id : target_ids) {
    for (const Pixel& p : objects.pixels_with_id(id)) gt.at(p.x, p.y) = next;
    ++next;
  }
  return gt;
}

std::string ids_to_string(const std::vector<uint16_t>& ids) {
  std::string s;
  for (uint16_t id : ids) {
    if (!s.empty()) s += ",";
    s += std::to_string(id);
  }
  return s;
}

}  // namespace

std::vector<Pixel> background_placements(const LabelMap& objects,
                                         const PixelSet& mask, int stride) {
  if (mask.empty()) throw std::invalid_argument("empty mask");
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  const Box bb = raster::bounding_box(mask);
  std::vector<Pixel> rel;  // mask relative to its bbox
  rel.reserve(mask.size());
  for (const Pixel& p : mask) rel.push_back({p.x - bb.x0, p.y - bb.y0});

  std::vector<Pixel> offsets;
  for (int py = 0; py + bb.height() <= objects.height; py += stride) {
    for (int px = 0; px + bb.width() <= objects.width; px += stride) {
      bool ok = true;
      for (const Pixel& p : rel) {
        if (objects.at(px + p.x, py + p.y) != 0) {
          ok = false;
          break;
        }
      }
      if (ok) offsets.push_back({px - bb.x0, py - bb.y0});
    }
  }
  return offsets;
}

ForgeryOutput retouch_blur(const Raster& image, const LabelMap& objects,
                           const std::vector<uint16_t>& target_ids,
                           double sigma, uint64_t rng_seed) {
  require_ids(objects, target_ids);
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  ForgeryOutput out;
  out.image = image;
  for (uint16_t id : target_ids)
    blur_region(out.image, objects.pixels_with_id(id), sigma);
  out.gt = gt_for_targets(objects, target_ids);
  out.modality = "retouch_blur";
  out.params = {{"sigma", std::to_string(sigma)},
                {"target_ids", ids_to_string(target_ids)}};
  out.seed = rng_seed;
  return out;
}

ForgeryOutput retouch_contrast(const Raster& image, const LabelMap& objects,
                               const std::vector<uint16_t>& target_ids,
                               double gain, double bias, uint64_t rng_seed) {
  require_ids(objects, target_ids);
  if (gain <= 0.0) throw std::invalid_argument("gain must be positive");
  ForgeryOutput out;
  out.image = image;
  for (uint16_t id : target_ids)
    contrast_region(out.image, objects.pixels_with_id(id), gain, bias);
  out.gt = gt_for_targets(objects, target_ids);
  out.modality = "retouch_contrast";
  out.params = {{"gain", std::to_string(gain)},
                {"bias", std::to_string(bias)},
                {"target_ids", ids_to_string(target_ids)}};
  out.seed = rng_seed;
  return out;
}

ForgeryOutput clean_brute_force(const Raster& image, const LabelMap& objects,
                                uint16_t target_id, int search_stride,
                                int feather_width, uint64_t rng_seed) {
  require_ids(objects, {target_id});
  const PixelSet mask = objects.pixels_with_id(target_id);
  const std::vector<Pixel> offsets =
      background_placements(objects, mask, search_stride);
  if (offsets.empty())
    throw std::runtime_error("no background fits object shape");

  const raster::ColorHistogram target_hist = raster::color_histogram(image, mask);
  double best_d = std::numeric_limits<double>::infinity();
  Pixel best{};
  for (const Pixel& off : offsets) {
    PixelSet cand;
    cand.reserve(mask.size());
    for (const Pixel& p : mask) cand.push_back({p.x + off.x, p.y + off.y});
    double d = raster::histogram_distance(
        raster::color_histogram(image, cand), target_hist);
    if (d < best_d) {  // scan order breaks ties at the smallest (y, x)
      best_d = d;
      best = off;
    }
  }

  Raster patch = image;
  PixelSet chosen;
  chosen.reserve(mask.size());
  for (const Pixel& p : mask) {
    chosen.push_back({p.x + best.x, p.y + best.y});
    for (int c = 0; c < image.channels; ++c)
      patch.at(p.x, p.y, c) = image.at(p.x + best.x, p.y + best.y, c);
  }

  ForgeryOutput out;
  out.image = raster::feather_blend(image, patch, mask, feather_width);
  out.gt = LabelMap(image.width, image.height, 0);
  for (const Pixel& p :
       raster::dilate(mask, feather_width, image.width, image.height))
    out.gt.at(p.x, p.y) = 1;
  LabelMap gt2(image.width, image.height, 0);
  for (const Pixel& p : chosen) gt2.at(p.x, p.y) = 2;
  out.gt_secondary = std::move(gt2);
  out.modality = "clean_brute_force";
  out.params = {{"target_id", std::to_string(target_id)},
                {"stride", std::to_string(search_stride)},
                {"feather_width", std::to_string(feather_width)},
                {"offset_dx", std::to_string(best.x)},
                {"offset_dy", std::to_string(best.y)},
                {"histogram_distance", std::to_string(best_d)}};
  out.seed = rng_seed;
  return out;
}

ForgeryOutput clean_inpaint(const Raster& image, const LabelMap& objects,
                            uint16_t target_id, int patch_radius) {
  require_ids(objects, {target_id});
  if (patch_radius < 1) throw std::invalid_argument("patch radius must be >= 1");
  const int w = image.width, h = image.height;
  const PixelSet target = objects.pixels_with_id(target_id);
  if (static_cast<int>(target.size()) == w * h)
    throw std::invalid_argument("target covers the whole image");

  Raster work = image;
  std::vector<uint8_t> filled(static_cast<size_t>(w) * h, 1);
  std::vector<double> confidence(static_cast<size_t>(w) * h, 1.0);
  for (const Pixel& p : target) {
    filled[static_cast<size_t>(p.y) * w + p.x] = 0;
    confidence[static_cast<size_t>(p.y) * w + p.x] = 0.0;
  }
  auto is_filled = [&](int x, int y) {
    return filled[static_cast<size_t>(y) * w + x] != 0;
  };

  const int r = patch_radius;
  size_t remaining = target.size();
  auto gray = [&](int x, int y) {
    if (work.channels == 1) return static_cast<double>(work.at(x, y, 0));
    return (299.0 * work.at(x, y, 0) + 587.0 * work.at(x, y, 1) +
            114.0 * work.at(x, y, 2)) / 1000.0;
  };

  while (remaining > 0) {
    // Fill front: unfilled pixels with a filled 4-neighbor.
    std::vector<Pixel> front;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (is_filled(x, y)) continue;
        bool edge = (x > 0 && is_filled(x - 1, y)) ||
                    (x + 1 < w && is_filled(x + 1, y)) ||
                    (y > 0 && is_filled(x, y - 1)) ||
                    (y + 1 < h && is_filled(x, y + 1));
        if (edge) front.push_back({x, y});
      }
    if (front.empty()) throw std::runtime_error("inpaint stalled");

    // Priority P = C * D over the front.
    double best_p = -1.0;
    Pixel best{};
    double best_c = 0.0;
    const double area = static_cast<double>((2 * r + 1) * (2 * r + 1));
    for (const Pixel& p : front) {
      double csum = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          int x = p.x + dx, y = p.y + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          if (is_filled(x, y))
            csum += confidence[static_cast<size_t>(y) * w + x];
        }
      double conf = csum / area;

      // Isophote from filled neighbors, front normal from the fill mask.
      auto grad_at = [&](int x, int y, double& gx, double& gy) {
        int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
        int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
        gx = (is_filled(xr, y) && is_filled(xl, y))
                 ? (gray(xr, y) - gray(xl, y)) / 2.0 : 0.0;
        gy = (is_filled(x, yd) && is_filled(x, yu))
                 ? (gray(x, yd) - gray(x, yu)) / 2.0 : 0.0;
      };
      double gx = 0.0, gy = 0.0;
      // Strongest gradient among filled pixels adjacent to p.
      double best_mag = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int x = p.x + dx, y = p.y + dy;
          if (x < 0 || y < 0 || x >= w || y >= h || !is_filled(x, y)) continue;
          double tx, ty;
          grad_at(x, y, tx, ty);
          double mag = tx * tx + ty * ty;
          if (mag > best_mag) {
            best_mag = mag;
            gx = tx;
            gy = ty;
          }
        }
      int xl = std::max(p.x - 1, 0), xr = std::min(p.x + 1, w - 1);
      int yu = std::max(p.y - 1, 0), yd = std::min(p.y + 1, h - 1);
      double nx = (is_filled(xr, p.y) ? 1.0 : 0.0) -
                  (is_filled(xl, p.y) ? 1.0 : 0.0);
      double ny = (is_filled(p.x, yd) ? 1.0 : 0.0) -
                  (is_filled(p.x, yu) ? 1.0 : 0.0);
      double nlen = std::sqrt(nx * nx + ny * ny);
      if (nlen > 0) {
        nx /= nlen;
        ny /= nlen;
      }
      // Isophote is the gradient rotated 90 degrees.
      double data = std::abs(-gy * nx + gx * ny) / 255.0 + 1e-3;
      double prio = conf * data;
      if (prio > best_p) {
        best_p = prio;
        best = p;
        best_c = conf;
      }
    }

    // Best-matching source patch by SSD over the filled pixels.
    double best_ssd = std::numeric_limits<double>::infinity();
    Pixel src{};
    for (int sy = r; sy + r < h; ++sy) {
      for (int sx = r; sx + r < w; ++sx) {
        bool usable = true;
        double ssd = 0.0;
        for (int dy = -r; dy <= r && usable; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            if (!is_filled(sx + dx, sy + dy)) {
              usable = false;
              break;
            }
            int tx = best.x + dx, ty = best.y + dy;
            if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
            if (!is_filled(tx, ty)) continue;
            for (int c = 0; c < work.channels; ++c) {
              double d = static_cast<double>(work.at(tx, ty, c)) -
                         work.at(sx + dx, sy + dy, c);
              ssd += d * d;
            }
          }
        if (usable && ssd < best_ssd) {
          best_ssd = ssd;
          src = {sx, sy};
        }
      }
    }
    if (std::isinf(best_ssd)) throw std::runtime_error("inpaint stalled");

    size_t filled_now = 0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        int tx = best.x + dx, ty = best.y + dy;
        if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
        if (is_filled(tx, ty)) continue;
        for (int c = 0; c < work.channels; ++c)
          work.at(tx, ty, c) = work.at(src.x + dx, src.y + dy, c);
        filled[static_cast<size_t>(ty) * w + tx] = 1;
        confidence[static_cast<size_t>(ty) * w + tx] = best_c;
        ++filled_now;
      }
    if (filled_now == 0) throw std::runtime_error("inpaint stalled");
    remaining -= filled_now;
  }

  ForgeryOutput out;
  out.image = std::move(work);
  out.gt = LabelMap(w, h, 0);
  for (const Pixel& p : target) out.gt.at(p.x, p.y) = 1;
  out.modality = "clean_inpaint";
  out.params = {{"target_id", std::to_string(target_id)},
                {"patch_radius", std::to_string(patch_radius)}};
  return out;
}

ForgeryOutput copy_move(const Raster& image, const LabelMap& objects,
                        uint16_t source_id,
                        const std::vector<GeometricTransform>& transforms,
                        const std::optional<RetouchSpec>& post,
                        uint64_t rng_seed) {
  require_ids(objects, {source_id});
  if (transforms.empty()) throw std::invalid_argument("transforms empty");
  const bool any_scaling = std::any_of(
      transforms.begin(), transforms.end(), [](const GeometricTransform& t) {
        return t.kind == raster::TransformKind::Scaling;
      });
  const bool all_scaling = std::all_of(
      transforms.begin(), transforms.end(), [](const GeometricTransform& t) {
        return t.kind == raster::TransformKind::Scaling;
      });
  if (any_scaling && all_scaling)
    throw std::invalid_argument("scaling must be combined");

  const PixelSet source = objects.pixels_with_id(source_id);
  raster::TransformedPatch tp = raster::transform_region(image, source, transforms);

  // Pasted pixels, clipped to image bounds.
  PixelSet pasted;
  std::vector<uint8_t> covered(source.size(), 0);
  ForgeryOutput out;
  out.image = image;
  out.gt = LabelMap(image.width, image.height, 0);
  for (int py = 0; py < tp.patch.height; ++py)
    for (int px = 0; px < tp.patch.width; ++px) {
      if (!tp.valid_at(px, py)) continue;
      int x = tp.origin_x + px, y = tp.origin_y + py;
      if (!image.in_bounds(x, y)) continue;
      pasted.push_back({x, y});
      for (int c = 0; c < image.channels; ++c)
        out.image.at(x, y, c) = tp.patch.at(px, py, c);
    }
  for (size_t i = 0; i < source.size(); ++i)
    covered[i] = std::binary_search(pasted.begin(), pasted.end(), source[i],
                                    [](const Pixel& a, const Pixel& b) {
                                      return a.y != b.y ? a.y < b.y
                                                        : a.x < b.x;
                                    });
  if (std::all_of(covered.begin(), covered.end(),
                  [](uint8_t v) { return v != 0; }))
    throw std::runtime_error("copy fully covers its source");

  if (post) apply_post(out.image, pasted, *post, out.params);

  for (const Pixel& p : source) out.gt.at(p.x, p.y) = 1;
  for (const Pixel& p : pasted) out.gt.at(p.x, p.y) = 1;
  out.modality = "copy_move";
  std::string tnames;
  for (const GeometricTransform& t : transforms) {
    if (!tnames.empty()) tnames += "+";
    tnames += t.name();
  }
  out.params["transforms"] = tnames;
  out.params["source_id"] = std::to_string(source_id);
  out.seed = rng_seed;
  return out;
}

ForgeryOutput copy_move_random(const Raster& image, const LabelMap& objects,
                               uint64_t rng_seed, int search_stride) {
  const std::vector<uint16_t> ids = objects.distinct_ids();
  if (ids.empty()) throw std::invalid_argument("object map has no objects");
  Rng rng(rng_seed);
  const size_t start = rng.uniform(ids.size());
  for (size_t k = 0; k < ids.size(); ++k) {
    uint16_t id = ids[(start + k) % ids.size()];
    PixelSet mask = objects.pixels_with_id(id);
    std::vector<Pixel> offsets =
        background_placements(objects, mask, search_stride);
    if (offsets.empty()) continue;
    Pixel off = offsets[rng.uniform(offsets.size())];

    ForgeryOutput out;
    out.image = image;
    out.gt = LabelMap(image.width, image.height, 0);
    for (const Pixel& p : mask) {
      out.gt.at(p.x, p.y) = 1;
      out.gt.at(p.x + off.x, p.y + off.y) = 1;
      for (int c = 0; c < image.channels; ++c)
        out.image.at(p.x + off.x, p.y + off.y, c) = image.at(p.x, p.y, c);
    }
    out.modality = "copy_move_random";
    out.params = {{"source_id", std::to_string(id)},
                  {"offset_dx", std::to_string(off.x)},
                  {"offset_dy", std::to_string(off.y)},
                  {"stride", std::to_string(search_stride)}};
    out.seed = rng_seed;
    return out;
  }
  throw std::runtime_error("no background placement for any object");
}

OverlapPair overlap_split(const Raster& image, int crop_w, int crop_h,
                          double overlap_fraction,
                          const std::optional<RetouchSpec>& post,
                          uint64_t rng_seed) {
  if (crop_w < 2 || crop_h < 2 || crop_w > image.width ||
      crop_h > image.height)
    throw std::invalid_argument("crop does not fit image");
  if (overlap_fraction <= 0.0 || overlap_fraction >= 1.0)
    throw std::invalid_argument("overlap fraction must be in (0,1)");

  // Shift along one axis; the overlap fraction is then 1 - d/extent.
  const int dx_needed = std::max(
      1, static_cast<int>(std::lround((1.0 - overlap_fraction) * crop_w)));
  const int dy_needed = std::max(
      1, static_cast<int>(std::lround((1.0 - overlap_fraction) * crop_h)));
  const bool horiz_ok = crop_w + dx_needed <= image.width;
  const bool vert_ok = crop_h + dy_needed <= image.height;
  if (!horiz_ok && !vert_ok)
    throw std::invalid_argument("infeasible overlap geometry");

  Rng rng(rng_seed);
  const bool horizontal = horiz_ok && (!vert_ok || rng.coin());
  const int d = horizontal ? dx_needed : dy_needed;
  const double actual = horizontal ? 1.0 - static_cast<double>(d) / crop_w
                                   : 1.0 - static_cast<double>(d) / crop_h;
  if (std::abs(actual - overlap_fraction) > 0.05)
    throw std::invalid_argument("overlap fraction not achievable for crop size");

  const int span_w = horizontal ? crop_w + d : crop_w;
  const int span_h = horizontal ? crop_h : crop_h + d;
  const int x0 = static_cast<int>(rng.uniform(image.width - span_w + 1));
  const int y0 = static_cast<int>(rng.uniform(image.height - span_h + 1));

  OverlapPair out;
  out.crop_a = {x0, y0, x0 + crop_w - 1, y0 + crop_h - 1};
  out.crop_b = horizontal
                   ? Box{x0 + d, y0, x0 + d + crop_w - 1, y0 + crop_h - 1}
                   : Box{x0, y0 + d, x0 + crop_w - 1, y0 + d + crop_h - 1};

  auto crop = [&](const Box& b) {
    Raster c(crop_w, crop_h, image.channels, 0);
    for (int y = 0; y < crop_h; ++y)
      for (int x = 0; x < crop_w; ++x)
        for (int ch = 0; ch < image.channels; ++ch)
          c.at(x, y, ch) = image.at(b.x0 + x, b.y0 + y, ch);
    return c;
  };
  out.image_a = crop(out.crop_a);
  out.image_b = crop(out.crop_b);

  out.gt_a = LabelMap(crop_w, crop_h, 0);
  out.gt_b = LabelMap(crop_w, crop_h, 0);
  for (int y = 0; y < crop_h; ++y)
    for (int x = 0; x < crop_w; ++x) {
      bool in_overlap = horizontal ? x >= d : y >= d;
      if (in_overlap) {
        out.gt_a.at(x, y) = 1;
        out.gt_b.at(horizontal ? x - d : x, horizontal ? y : y - d) = 1;
      }
    }

  if (post) {
    // The whole crop A is post-processed, not only the overlap.
    PixelSet all;
    all.reserve(static_cast<size_t>(crop_w) * crop_h);
    for (int y = 0; y < crop_h; ++y)
      for (int x = 0; x < crop_w; ++x) all.push_back({x, y});
    Params dummy;
    apply_post(out.image_a, all, *post, dummy);
    out.post_processed = "a";
  }
  out.seed = rng_seed;
  return out;
}

ForgeryOutput splice(const Raster& host, const LabelMap& host_objects,
                     const Raster& donor, const LabelMap& donor_objects,
                     uint16_t donor_id, uint64_t rng_seed) {
  if (host_objects.width != host.width || host_objects.height != host.height)
    throw std::invalid_argument("host object map shape mismatch");
  require_ids(donor_objects, {donor_id});
  const PixelSet mask = donor_objects.pixels_with_id(donor_id);
  const Box bb = raster::bounding_box(mask);
  if (bb.width() > host.width || bb.height() > host.height)
    throw std::runtime_error("no background placement for donor object");

  const std::vector<Pixel> offsets =
      background_placements(host_objects, mask, 4);
  if (offsets.empty())
    throw std::runtime_error("no background placement for donor object");
  Rng rng(rng_seed);
  const Pixel off = offsets[rng.uniform(offsets.size())];

  ForgeryOutput out;
  out.image = host;
  out.gt = LabelMap(host.width, host.height, 0);
  for (const Pixel& p : mask) {
    int x = p.x + off.x, y = p.y + off.y;
    out.gt.at(x, y) = 1;
    for (int c = 0; c < host.channels; ++c)
      out.image.at(x, y, c) = donor.at(p.x, p.y, c);
  }
  out.modality = "splice";
  out.params = {{"donor_id", std::to_string(donor_id)},
                {"donor_bbox", std::to_string(bb.x0) + "," +
                                   std::to_string(bb.y0) + "," +
                                   std::to_string(bb.x1) + "," +
                                   std::to_string(bb.y1)},
                {"offset_dx", std::to_string(off.x)},
                {"offset_dy", std::to_string(off.y)}};
  out.seed = rng_seed;
  return out;
}

namespace {

uint16_t pick_object(const LabelMap& objects, Rng& rng) {
  const std::vector<uint16_t> ids = objects.distinct_ids();
  if (ids.empty()) throw std::invalid_argument("object map has no objects");
  return ids[rng.uniform(ids.size())];
}

// Samples a paste offset that keeps the transformed patch in bounds and
// leaves a gap to the source so source and copy stay separate components.
GeometricTransform sample_translation(const Raster& image,
                                      const LabelMap& objects, uint16_t id,
                                      const std::vector<GeometricTransform>& pre,
                                      Rng& rng) {
  const PixelSet source = objects.pixels_with_id(id);
  raster::TransformedPatch tp =
      pre.empty() ? raster::transform_region(
                        image, source, GeometricTransform::translation(0, 0))
                  : raster::transform_region(image, source, pre);
  const Box src_bb = raster::bounding_box(source);
  const int w = tp.patch.width, h = tp.patch.height;
  for (int attempt = 0; attempt < 64; ++attempt) {
    int nx = static_cast<int>(rng.uniform(std::max(1, image.width - w + 1)));
    int ny = static_cast<int>(rng.uniform(std::max(1, image.height - h + 1)));
    Box dst{nx, ny, nx + w - 1, ny + h - 1};
    // Require a 2 px gap to the source bbox.
    bool separated = dst.x0 > src_bb.x1 + 2 || dst.x1 < src_bb.x0 - 2 ||
                     dst.y0 > src_bb.y1 + 2 || dst.y1 < src_bb.y0 - 2;
    if (!separated) continue;
    return GeometricTransform::translation(nx - tp.origin_x,
                                           ny - tp.origin_y);
  }
  throw std::runtime_error("no separated paste position found");
}

ForgeryOutput copy_move_with(const Raster& image, const LabelMap& objects,
                             std::vector<GeometricTransform> pre,
                             uint64_t seed) {
  Rng rng(seed);
  uint16_t id = pick_object(objects, rng);
  std::vector<GeometricTransform> ts = pre;
  ts.push_back(sample_translation(image, objects, id, pre, rng));
  return copy_move(image, objects, id, ts, std::nullopt, seed);
}

}  // namespace

const std::map<std::string, ForgeryFn>& default_registry() {
  static const std::map<std::string, ForgeryFn> registry = {
      {"copy_move_translation",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         return copy_move_with(img, obj, {}, seed);
       }},
      {"copy_move_flip",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         auto axis = rng.coin() ? raster::FlipAxis::Horizontal
                                : raster::FlipAxis::Vertical;
         return copy_move_with(img, obj, {GeometricTransform::flip(axis)},
                               seed ^ 0x517cc1b727220a95ull);
       }},
      {"copy_move_rotation",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         double angle = rng.uniform_real(5.0, 355.0);
         return copy_move_with(img, obj,
                               {GeometricTransform::rotation(angle)},
                               seed ^ 0x2545f4914f6cdd1dull);
       }},
      {"copy_move_rotation90",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         return copy_move_with(img, obj, {GeometricTransform::rotation(90)},
                               seed);
       }},
      {"copy_move_rotation180",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         return copy_move_with(img, obj, {GeometricTransform::rotation(180)},
                               seed);
       }},
      {"copy_move_random",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         return copy_move_random(img, obj, seed, 4);
       }},
      {"brute_force",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         return clean_brute_force(img, obj, pick_object(obj, rng), 4, 2, seed);
       }},
      {"inpainting",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         return clean_inpaint(img, obj, pick_object(obj, rng), 4);
       }},
      {"blurring",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         uint16_t id = pick_object(obj, rng);
         double sigma = rng.uniform_real(1.5, 4.0);
         return retouch_blur(img, obj, {id}, sigma, seed);
       }},
      {"contrast",
       [](const Raster& img, const LabelMap& obj, uint64_t seed) {
         Rng rng(seed);
         uint16_t id = pick_object(obj, rng);
         double gain = rng.uniform_real(0.6, 1.6);
         double bias = rng.uniform_real(-40.0, 40.0);
         return retouch_contrast(img, obj, {id}, gain, bias, seed);
       }},
  };
  return registry;
}

}  // namespace sciforge::forge
