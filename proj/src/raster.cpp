#include "sciforge/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sciforge::raster {

Raster::Raster(int w, int h, int c, uint8_t fill)
    : width(w), height(h), channels(c),
      data(static_cast<size_t>(w) * h * c, fill) {
  if (w < 1 || h < 1 || (c != 1 && c != 3))
    throw std::invalid_argument("invalid raster shape");
}

Box bounding_box(const PixelSet& pixels) {
  Box b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
        std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
  for (const Pixel& p : pixels) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  if (pixels.empty()) b = Box{};
  return b;
}

size_t LabelMap::count_nonzero() const {
  size_t n = 0;
  for (uint16_t v : ids) n += (v != 0);
  return n;
}

PixelSet LabelMap::pixels_with_id(uint16_t id) const {
  PixelSet out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (at(x, y) == id) out.push_back({x, y});
  return out;
}

PixelSet LabelMap::nonzero_pixels() const {
  PixelSet out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (at(x, y) != 0) out.push_back({x, y});
  return out;
}

std::vector<uint16_t> LabelMap::distinct_ids() const {
  std::vector<bool> seen(65536, false);
  for (uint16_t v : ids) seen[v] = true;
  std::vector<uint16_t> out;
  for (int v = 1; v < 65536; ++v)
    if (seen[v]) out.push_back(static_cast<uint16_t>(v));
  return out;
}

std::vector<Component> connected_components(const LabelMap& map,
                                            int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connectivity must be 4 or 8");
  const int w = map.width, h = map.height;
  std::vector<uint8_t> visited(static_cast<size_t>(w) * h, 0);
  std::vector<Component> comps;

  static const int dx8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static const int dy8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static const int dx4[] = {0, -1, 1, 0};
  static const int dy4[] = {-1, 0, 0, 1};
  const int* dx = connectivity == 8 ? dx8 : dx4;
  const int* dy = connectivity == 8 ? dy8 : dy4;
  const int nn = connectivity;

  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint16_t id = map.at(x, y);
      if (id == 0 || visited[static_cast<size_t>(y) * w + x]) continue;
      Component c;
      c.region_id = id;
      stack.clear();
      stack.push_back({x, y});
      visited[static_cast<size_t>(y) * w + x] = 1;
      while (!stack.empty()) {
        Pixel p = stack.back();
        stack.pop_back();
        c.pixels.push_back(p);
        for (int k = 0; k < nn; ++k) {
          int nx = p.x + dx[k], ny = p.y + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          size_t idx = static_cast<size_t>(ny) * w + nx;
          if (visited[idx] || map.at(nx, ny) != id) continue;
          visited[idx] = 1;
          stack.push_back({nx, ny});
        }
      }
      std::sort(c.pixels.begin(), c.pixels.end(),
                [](const Pixel& a, const Pixel& b) {
                  return a.y != b.y ? a.y < b.y : a.x < b.x;
                });
      c.area = static_cast<int>(c.pixels.size());
      c.bbox = bounding_box(c.pixels);
      comps.push_back(std::move(c));
    }
  }
  // Scan order already yields top-left-most first within an id.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Component& a, const Component& b) {
                     return a.region_id < b.region_id;
                   });
  return comps;
}

ColorHistogram color_histogram(const Raster& image, const PixelSet& region,
                               int bins) {
  if (region.empty()) throw std::invalid_argument("empty region");
  if (bins < 1) throw std::invalid_argument("bins must be positive");
  ColorHistogram h;
  h.bins_per_channel = bins;
  h.counts.assign(image.channels, std::vector<double>(bins, 0.0));
  for (const Pixel& p : region) {
    if (!image.in_bounds(p.x, p.y))
      throw std::out_of_range("region pixel out of bounds");
    for (int c = 0; c < image.channels; ++c) {
      int bin = image.at(p.x, p.y, c) * bins / 256;
      h.counts[c][bin] += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(region.size());
  for (auto& ch : h.counts)
    for (double& v : ch) v *= inv;
  return h;
}

double histogram_distance(const ColorHistogram& a, const ColorHistogram& b) {
  if (a.bins_per_channel != b.bins_per_channel ||
      a.counts.size() != b.counts.size())
    throw std::invalid_argument("histogram shape mismatch");
  double d = 0.0;
  for (size_t c = 0; c < a.counts.size(); ++c)
    for (int i = 0; i < a.bins_per_channel; ++i)
      d += std::abs(a.counts[c][i] - b.counts[c][i]);
  return d;
}

GeometricTransform GeometricTransform::translation(int dx, int dy) {
  GeometricTransform t;
  t.kind = TransformKind::Translation;
  t.dx = dx;
  t.dy = dy;
  return t;
}
GeometricTransform GeometricTransform::rotation(double angle_deg) {
  GeometricTransform t;
  t.kind = TransformKind::Rotation;
  t.angle_deg = angle_deg;
  return t;
}
GeometricTransform GeometricTransform::flip(FlipAxis axis) {
  GeometricTransform t;
  t.kind = TransformKind::Flip;
  t.flip_axis = axis;
  return t;
}
GeometricTransform GeometricTransform::scaling(double factor) {
  if (factor <= 0.0) throw std::invalid_argument("scale must be positive");
  GeometricTransform t;
  t.kind = TransformKind::Scaling;
  t.scale = factor;
  return t;
}

std::string GeometricTransform::name() const {
  switch (kind) {
    case TransformKind::Translation: return "translation";
    case TransformKind::Rotation: return "rotation";
    case TransformKind::Flip: return "flip";
    case TransformKind::Scaling: return "scaling";
  }
  return "?";
}

PixelSet TransformedPatch::mask_pixels() const {
  PixelSet out;
  for (int y = 0; y < patch.height; ++y)
    for (int x = 0; x < patch.width; ++x)
      if (valid_at(x, y)) out.push_back({origin_x + x, origin_y + y});
  return out;
}

namespace {

TransformedPatch crop_patch(const Raster& image, const PixelSet& mask) {
  if (mask.empty()) throw std::invalid_argument("empty mask");
  for (const Pixel& p : mask)
    if (!image.in_bounds(p.x, p.y))
      throw std::out_of_range("mask pixel out of bounds");
  Box b = bounding_box(mask);
  TransformedPatch tp;
  tp.patch = Raster(b.width(), b.height(), image.channels, 0);
  tp.valid.assign(static_cast<size_t>(b.width()) * b.height(), 0);
  tp.origin_x = b.x0;
  tp.origin_y = b.y0;
  for (const Pixel& p : mask) {
    int px = p.x - b.x0, py = p.y - b.y0;
    tp.valid[static_cast<size_t>(py) * b.width() + px] = 1;
    for (int c = 0; c < image.channels; ++c)
      tp.patch.at(px, py, c) = image.at(p.x, p.y, c);
  }
  return tp;
}

int center_origin(double center, int new_extent) {
  return static_cast<int>(std::lround(center - (new_extent - 1) / 2.0));
}

uint8_t bilinear_sample(const Raster& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  int x1 = std::min(x0 + 1, img.width - 1);
  int y1 = std::min(y0 + 1, img.height - 1);
  double fx = x - x0, fy = y - y0;
  double v = (1 - fx) * (1 - fy) * img.at(x0, y0, c) +
             fx * (1 - fy) * img.at(x1, y0, c) +
             (1 - fx) * fy * img.at(x0, y1, c) +
             fx * fy * img.at(x1, y1, c);
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

TransformedPatch rotate_exact(const TransformedPatch& in, int quarter_turns) {
  const int w = in.patch.width, h = in.patch.height, ch = in.patch.channels;
  int nw = (quarter_turns % 2 == 0) ? w : h;
  int nh = (quarter_turns % 2 == 0) ? h : w;
  TransformedPatch out;
  out.patch = Raster(nw, nh, ch, 0);
  out.valid.assign(static_cast<size_t>(nw) * nh, 0);
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      int sx, sy;
      switch (quarter_turns) {
        case 1: sx = w - 1 - y; sy = x; break;       // 90
        case 2: sx = w - 1 - x; sy = h - 1 - y; break;  // 180
        default: sx = y; sy = h - 1 - x; break;      // 270
      }
      if (!in.valid_at(sx, sy)) continue;
      out.valid[static_cast<size_t>(y) * nw + x] = 1;
      for (int c = 0; c < ch; ++c)
        out.patch.at(x, y, c) = in.patch.at(sx, sy, c);
    }
  }
  out.origin_x = center_origin(in.origin_x + (w - 1) / 2.0, nw);
  out.origin_y = center_origin(in.origin_y + (h - 1) / 2.0, nh);
  return out;
}

TransformedPatch rotate_bilinear(const TransformedPatch& in, double deg) {
  const double rad = deg * 3.14159265358979323846 / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const int w = in.patch.width, h = in.patch.height, ch = in.patch.channels;
  int nw = static_cast<int>(std::ceil(std::abs(w * cs) + std::abs(h * sn)));
  int nh = static_cast<int>(std::ceil(std::abs(w * sn) + std::abs(h * cs)));
  nw = std::max(nw, 1);
  nh = std::max(nh, 1);
  TransformedPatch out;
  out.patch = Raster(nw, nh, ch, 0);
  out.valid.assign(static_cast<size_t>(nw) * nh, 0);
  const double scx = (w - 1) / 2.0, scy = (h - 1) / 2.0;
  const double dcx = (nw - 1) / 2.0, dcy = (nh - 1) / 2.0;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double u = x - dcx, v = y - dcy;
      // Inverse map; matches the exact quarter-turn indexing at 90 degrees.
      double xs = u * cs - v * sn + scx;
      double ys = u * sn + v * cs + scy;
      int nxs = static_cast<int>(std::lround(xs));
      int nys = static_cast<int>(std::lround(ys));
      if (nxs < 0 || nys < 0 || nxs >= w || nys >= h) continue;
      if (!in.valid_at(nxs, nys)) continue;
      out.valid[static_cast<size_t>(y) * nw + x] = 1;
      for (int c = 0; c < ch; ++c)
        out.patch.at(x, y, c) = bilinear_sample(in.patch, xs, ys, c);
    }
  }
  out.origin_x = center_origin(in.origin_x + (w - 1) / 2.0, nw);
  out.origin_y = center_origin(in.origin_y + (h - 1) / 2.0, nh);
  return out;
}

TransformedPatch scale_patch(const TransformedPatch& in, double s) {
  const int w = in.patch.width, h = in.patch.height, ch = in.patch.channels;
  int nw = std::max(1, static_cast<int>(std::lround(w * s)));
  int nh = std::max(1, static_cast<int>(std::lround(h * s)));
  TransformedPatch out;
  out.patch = Raster(nw, nh, ch, 0);
  out.valid.assign(static_cast<size_t>(nw) * nh, 0);
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double xs = (x + 0.5) * w / nw - 0.5;
      double ys = (y + 0.5) * h / nh - 0.5;
      int nxs = std::clamp(static_cast<int>(std::lround(xs)), 0, w - 1);
      int nys = std::clamp(static_cast<int>(std::lround(ys)), 0, h - 1);
      if (!in.valid_at(nxs, nys)) continue;
      out.valid[static_cast<size_t>(y) * nw + x] = 1;
      for (int c = 0; c < ch; ++c)
        out.patch.at(x, y, c) = bilinear_sample(in.patch, xs, ys, c);
    }
  }
  out.origin_x = center_origin(in.origin_x + (w - 1) / 2.0, nw);
  out.origin_y = center_origin(in.origin_y + (h - 1) / 2.0, nh);
  return out;
}

TransformedPatch flip_patch(const TransformedPatch& in, FlipAxis axis) {
  const int w = in.patch.width, h = in.patch.height, ch = in.patch.channels;
  TransformedPatch out = in;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sx = axis == FlipAxis::Horizontal ? w - 1 - x : x;
      int sy = axis == FlipAxis::Vertical ? h - 1 - y : y;
      out.valid[static_cast<size_t>(y) * w + x] =
          in.valid[static_cast<size_t>(sy) * w + sx];
      for (int c = 0; c < ch; ++c)
        out.patch.at(x, y, c) = in.patch.at(sx, sy, c);
    }
  }
  return out;
}

bool fully_outside(const TransformedPatch& tp, int iw, int ih) {
  for (int y = 0; y < tp.patch.height; ++y)
    for (int x = 0; x < tp.patch.width; ++x)
      if (tp.valid_at(x, y)) {
        int ix = tp.origin_x + x, iy = tp.origin_y + y;
        if (ix >= 0 && iy >= 0 && ix < iw && iy < ih) return false;
      }
  return true;
}

}  // namespace

TransformedPatch apply_transform(const TransformedPatch& in,
                                 const GeometricTransform& t, int image_width,
                                 int image_height) {
  TransformedPatch out;
  switch (t.kind) {
    case TransformKind::Translation:
      out = in;
      out.origin_x += t.dx;
      out.origin_y += t.dy;
      break;
    case TransformKind::Flip:
      out = flip_patch(in, t.flip_axis);
      break;
    case TransformKind::Rotation: {
      double norm = std::fmod(t.angle_deg, 360.0);
      if (norm < 0) norm += 360.0;
      double q = norm / 90.0;
      if (std::abs(q - std::lround(q)) < 1e-12) {
        int turns = static_cast<int>(std::lround(q)) % 4;
        out = turns == 0 ? in : rotate_exact(in, turns);
      } else {
        out = rotate_bilinear(in, norm);
      }
      break;
    }
    case TransformKind::Scaling:
      out = scale_patch(in, t.scale);
      break;
  }
  if (fully_outside(out, image_width, image_height))
    throw std::runtime_error("out of bounds");
  return out;
}

TransformedPatch transform_region(const Raster& image, const PixelSet& mask,
                                  const GeometricTransform& t) {
  return apply_transform(crop_patch(image, mask), t, image.width,
                         image.height);
}

TransformedPatch transform_region(const Raster& image, const PixelSet& mask,
                                  const std::vector<GeometricTransform>& ts) {
  TransformedPatch tp = crop_patch(image, mask);
  for (const GeometricTransform& t : ts)
    tp = apply_transform(tp, t, image.width, image.height);
  return tp;
}

PixelSet dilate(const PixelSet& mask, int radius, int width, int height) {
  std::vector<uint8_t> hit(static_cast<size_t>(width) * height, 0);
  for (const Pixel& p : mask)
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        int x = p.x + dx, y = p.y + dy;
        if (x >= 0 && y >= 0 && x < width && y < height)
          hit[static_cast<size_t>(y) * width + x] = 1;
      }
  PixelSet out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (hit[static_cast<size_t>(y) * width + x]) out.push_back({x, y});
  return out;
}

Raster feather_blend(const Raster& base, const Raster& patch,
                     const PixelSet& mask, int feather_width) {
  if (!base.same_shape(patch))
    throw std::invalid_argument("base/patch shape mismatch");
  if (feather_width < 0) throw std::invalid_argument("negative feather width");
  const int w = base.width, h = base.height;
  std::vector<uint8_t> in_mask(static_cast<size_t>(w) * h, 0);
  for (const Pixel& p : mask) {
    if (!base.in_bounds(p.x, p.y))
      throw std::out_of_range("mask pixel out of bounds");
    in_mask[static_cast<size_t>(p.y) * w + p.x] = 1;
  }
  Raster out = base;
  if (feather_width == 0) {
    for (const Pixel& p : mask)
      for (int c = 0; c < base.channels; ++c)
        out.at(p.x, p.y, c) = patch.at(p.x, p.y, c);
    return out;
  }
  // Signed Euclidean distance to the mask boundary, positive inside; the
  // search window is bounded by the feather width so only the band is paid
  // for.
  const int r = feather_width + 1;
  PixelSet band = dilate(mask, feather_width, w, h);
  for (const Pixel& p : band) {
    const bool inside = in_mask[static_cast<size_t>(p.y) * w + p.x] != 0;
    double best = std::numeric_limits<double>::infinity();
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        int x = p.x + dx, y = p.y + dy;
        bool opposite;
        if (x < 0 || y < 0 || x >= w || y >= h)
          opposite = inside;  // outside the image counts as non-mask
        else
          opposite = (in_mask[static_cast<size_t>(y) * w + x] != 0) != inside;
        if (opposite)
          best = std::min(best, std::sqrt(double(dx) * dx + double(dy) * dy));
      }
    double s = std::isinf(best) ? (inside ? 1e9 : -1e9)
                                : (inside ? best : -best);
    double alpha =
        std::clamp((s + feather_width) / (2.0 * feather_width), 0.0, 1.0);
    if (alpha <= 0.0) continue;
    for (int c = 0; c < base.channels; ++c) {
      int b = base.at(p.x, p.y, c);
      int q = patch.at(p.x, p.y, c);
      int v = b + static_cast<int>(std::lround(alpha * (q - b)));
      out.at(p.x, p.y, c) = static_cast<uint8_t>(std::clamp(v, 0, 255));
    }
  }
  return out;
}

Raster resize_bilinear(const Raster& image, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw std::invalid_argument("invalid resize target");
  if (new_width == image.width && new_height == image.height) return image;
  Raster out(new_width, new_height, image.channels, 0);
  for (int y = 0; y < new_height; ++y) {
    double ys = (y + 0.5) * image.height / new_height - 0.5;
    for (int x = 0; x < new_width; ++x) {
      double xs = (x + 0.5) * image.width / new_width - 0.5;
      for (int c = 0; c < image.channels; ++c)
        out.at(x, y, c) = bilinear_sample(image, xs, ys, c);
    }
  }
  return out;
}

LabelMap resize_nearest(const LabelMap& map, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw std::invalid_argument("invalid resize target");
  LabelMap out(new_width, new_height);
  for (int y = 0; y < new_height; ++y) {
    int ys = std::min(static_cast<int>((y + 0.5) * map.height / new_height),
                      map.height - 1);
    for (int x = 0; x < new_width; ++x) {
      int xs = std::min(static_cast<int>((x + 0.5) * map.width / new_width),
                        map.width - 1);
      out.at(x, y) = map.at(xs, ys);
    }
  }
  return out;
}

Raster to_gray(const Raster& image) {
  if (image.channels == 1) return image;
  Raster out(image.width, image.height, 1, 0);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      int v = (299 * image.at(x, y, 0) + 587 * image.at(x, y, 1) +
               114 * image.at(x, y, 2) + 500) /
              1000;
      out.at(x, y, 0) = static_cast<uint8_t>(v);
    }
  return out;
}

}  // namespace sciforge::raster
