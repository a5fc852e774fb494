#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace sciforge::raster {

struct Pixel {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
};

using PixelSet = std::vector<Pixel>;

// Inclusive pixel bounding box.
struct Box {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool empty() const { return x1 < x0 || y1 < y0; }
  auto operator<=>(const Box&) const = default;
};

Box bounding_box(const PixelSet& pixels);

// 8-bit interleaved row-major image, 1 or 3 channels.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<uint8_t> data;

  Raster() = default;
  Raster(int w, int h, int c, uint8_t fill = 0);

  uint8_t& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  uint8_t at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  bool same_shape(const Raster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  bool operator==(const Raster& o) const = default;
};

// Per-pixel region IDs; 0 = pristine / no region.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> ids;

  LabelMap() = default;
  LabelMap(int w, int h, uint16_t fill = 0)
      : width(w), height(h), ids(static_cast<size_t>(w) * h, fill) {}

  uint16_t& at(int x, int y) { return ids[static_cast<size_t>(y) * width + x]; }
  uint16_t at(int x, int y) const {
    return ids[static_cast<size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  size_t count_nonzero() const;
  PixelSet pixels_with_id(uint16_t id) const;
  PixelSet nonzero_pixels() const;
  std::vector<uint16_t> distinct_ids() const;  // ascending, without 0
  bool operator==(const LabelMap& o) const = default;
};

struct Component {
  uint16_t region_id = 0;
  PixelSet pixels;  // row-major scan order
  int area = 0;
  Box bbox;
};

// Decomposes all nonzero pixels into connected components. Pixels only join
// when they share the same ID. Ordered by (region_id, first scan pixel).
std::vector<Component> connected_components(const LabelMap& map,
                                            int connectivity = 8);

struct ColorHistogram {
  int bins_per_channel = 0;
  // counts[c] sums to 1 per channel (all-zero only for an empty region).
  std::vector<std::vector<double>> counts;
};

ColorHistogram color_histogram(const Raster& image, const PixelSet& region,
                               int bins = 32);

// L1 distance summed over channels.
double histogram_distance(const ColorHistogram& a, const ColorHistogram& b);

enum class TransformKind { Translation, Rotation, Flip, Scaling };
enum class FlipAxis { Horizontal, Vertical };

struct GeometricTransform {
  TransformKind kind = TransformKind::Translation;
  int dx = 0, dy = 0;          // translation
  double angle_deg = 0.0;      // rotation
  FlipAxis flip_axis = FlipAxis::Horizontal;
  double scale = 1.0;          // scaling, > 0

  static GeometricTransform translation(int dx, int dy);
  static GeometricTransform rotation(double angle_deg);
  static GeometricTransform flip(FlipAxis axis);
  static GeometricTransform scaling(double factor);

  std::string name() const;
};

// A transformed region: content patch plus its placement in image coords.
// Patch pixel (px, py) sits at image coords (origin_x + px, origin_y + py);
// `valid` flags which patch pixels belong to the region.
struct TransformedPatch {
  Raster patch;
  std::vector<uint8_t> valid;
  int origin_x = 0;
  int origin_y = 0;

  bool valid_at(int px, int py) const {
    return valid[static_cast<size_t>(py) * patch.width + px];
  }
  // Region pixels in image coordinates, row-major.
  PixelSet mask_pixels() const;
};

// Extracts the masked content and applies one transform. Flips and 90-degree
// multiples are bit-lossless; arbitrary rotations and scalings resample
// content bilinearly and the mask by nearest neighbor.
TransformedPatch transform_region(const Raster& image, const PixelSet& mask,
                                  const GeometricTransform& t);
TransformedPatch transform_region(const Raster& image, const PixelSet& mask,
                                  const std::vector<GeometricTransform>& ts);
TransformedPatch apply_transform(const TransformedPatch& in,
                                 const GeometricTransform& t,
                                 int image_width, int image_height);

// Blends patch over base inside the mask with a linear feather band of the
// given width around the mask boundary. Pixels farther than feather_width
// (Chebyshev) from the mask are returned bit-equal to base.
Raster feather_blend(const Raster& base, const Raster& patch,
                     const PixelSet& mask, int feather_width);

// Chebyshev dilation of a pixel set, clipped to [0,w)x[0,h).
PixelSet dilate(const PixelSet& mask, int radius, int width, int height);

// Bilinear content resize.
Raster resize_bilinear(const Raster& image, int new_width, int new_height);
// Nearest-neighbor resize; label values are never interpolated.
LabelMap resize_nearest(const LabelMap& map, int new_width, int new_height);

Raster to_gray(const Raster& image);

}  // namespace sciforge::raster
