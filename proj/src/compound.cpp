#include "sciforge/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sciforge/font.hpp"
#include "sciforge/rng.hpp"

namespace sciforge::compound {

namespace {

using raster::Pixel;
using raster::PixelSet;

double log_aspect_diff(double a, double b) {
  return std::abs(std::log(a) - std::log(b));
}

bool inside_any_panel(const Template& t, int x, int y) {
  for (const Panel& p : t.panels)
    if (x >= p.rect.x0 && x <= p.rect.x1 && y >= p.rect.y0 && y <= p.rect.y1)
      return true;
  return false;
}

// White canvas with a 1-px black border drawn in the gutter around each
// panel, so panel content itself is never touched by the frame.
Raster blank_canvas(const Template& t) {
  Raster canvas(t.canvas_w, t.canvas_h, 3, 255);
  for (const Panel& p : t.panels) {
    for (int y = p.rect.y0 - 1; y <= p.rect.y1 + 1; ++y)
      for (int x = p.rect.x0 - 1; x <= p.rect.x1 + 1; ++x) {
        bool on_ring = x < p.rect.x0 || x > p.rect.x1 || y < p.rect.y0 ||
                       y > p.rect.y1;
        if (!on_ring || !canvas.in_bounds(x, y)) continue;
        if (inside_any_panel(t, x, y)) continue;
        for (int c = 0; c < 3; ++c) canvas.at(x, y, c) = 0;
      }
  }
  return canvas;
}

Raster fit_to(const Raster& img, int w, int h) {
  if (img.width == w && img.height == h) return img;
  return raster::resize_bilinear(img, w, h);
}

void place_content(Raster& canvas, const Box& rect, const Raster& content) {
  const Raster fitted = fit_to(content, rect.width(), rect.height());
  for (int y = 0; y < rect.height(); ++y)
    for (int x = 0; x < rect.width(); ++x)
      for (int c = 0; c < 3; ++c)
        canvas.at(rect.x0 + x, rect.y0 + y, c) = fitted.at(x, y, c);
}

void place_labels(LabelMap& gt, const Box& rect, const LabelMap& src) {
  LabelMap fitted = src;
  if (src.width != rect.width() || src.height != rect.height())
    fitted = raster::resize_nearest(src, rect.width(), rect.height());
  for (int y = 0; y < rect.height(); ++y)
    for (int x = 0; x < rect.width(); ++x)
      if (fitted.at(x, y) != 0)
        gt.at(rect.x0 + x, rect.y0 + y) = fitted.at(x, y);
}

Raster rot90(const Raster& img) {  // clockwise quarter turn
  Raster out(img.height, img.width, img.channels, 0);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(y, img.height - 1 - x, c);
  return out;
}

Raster rot180(const Raster& img) {
  Raster out(img.width, img.height, img.channels, 0);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(img.width - 1 - x, img.height - 1 - y, c);
  return out;
}

Raster flip_h(const Raster& img) {  // mirror left-right
  Raster out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
  return out;
}

// ---- text rendering ------------------------------------------------------

int text_scale(int panel_height) {
  // Glyph cells are 16 px tall at scale 1; aim at ~4% of the panel height.
  int s = static_cast<int>(std::lround(0.04 * panel_height / 16.0));
  return std::max(1, s);
}

int text_width(const std::string& text, int scale) {
  return static_cast<int>(text.size()) * font::kAdvance * scale;
}

int text_height(int scale) { return 2 * font::kGlyphHeight * scale; }

double mean_luminance(const Raster& img, const Box& b) {
  double sum = 0.0;
  long n = 0;
  for (int y = std::max(0, b.y0); y <= std::min(img.height - 1, b.y1); ++y)
    for (int x = std::max(0, b.x0); x <= std::min(img.width - 1, b.x1); ++x) {
      sum += (299.0 * img.at(x, y, 0) + 587.0 * img.at(x, y, 1) +
              114.0 * img.at(x, y, 2)) / 1000.0;
      ++n;
    }
  return n == 0 ? 255.0 : sum / n;
}

void draw_text(Raster& canvas, int x0, int y0, const std::string& text,
               int scale, uint8_t value) {
  int pen_x = x0;
  for (char c : text) {
    const uint8_t* rows = font::glyph(c);
    if (rows) {
      for (int gy = 0; gy < font::kGlyphHeight; ++gy)
        for (int gx = 0; gx < font::kGlyphWidth; ++gx) {
          if (!(rows[gy] & (0x80u >> gx))) continue;
          // Each font pixel covers scale x 2*scale (vertical doubling).
          for (int dy = 0; dy < 2 * scale; ++dy)
            for (int dx = 0; dx < scale; ++dx) {
              int x = pen_x + gx * scale + dx;
              int y = y0 + gy * 2 * scale + dy;
              if (!canvas.in_bounds(x, y)) continue;
              for (int ch = 0; ch < 3; ++ch) canvas.at(x, y, ch) = value;
            }
        }
    }
    pen_x += font::kAdvance * scale;
  }
}

void place_text(CompoundFigure& fig, const std::string& text, int x, int y,
                int scale, int level) {
  x = std::clamp(x, 0, std::max(0, fig.image.width - text_width(text, scale)));
  y = std::clamp(y, 0, std::max(0, fig.image.height - text_height(scale)));
  Box box{x, y, x + text_width(text, scale) - 1, y + text_height(scale) - 1};
  uint8_t value = mean_luminance(fig.image, box) < 64.0 ? 255 : 0;
  draw_text(fig.image, x, y, text, scale, value);
  fig.text_boxes.push_back({box, text, level});
}

std::string random_word(Rng& rng) {
  int len = 4 + static_cast<int>(rng.uniform(5));
  std::string w;
  for (int i = 0; i < len; ++i)
    w.push_back(static_cast<char>('a' + rng.uniform(26)));
  return w;
}

// ---- panel filling -------------------------------------------------------

// Pool entry with the nearest aspect ratio not used yet; -1 when exhausted.
int pick_pool_image(const std::vector<SourceImage>& pool,
                    std::vector<uint8_t>& used, double aspect) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pool.size(); ++i) {
    if (used[i]) continue;
    double ar = static_cast<double>(pool[i].image.width) /
                pool[i].image.height;
    double d = log_aspect_diff(ar, aspect);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) used[best] = 1;
  return best;
}

void fill_other_panels(CompoundFigure& fig, const Template& tmpl,
                       size_t skip_a, size_t skip_b,
                       const std::vector<SourceImage>& pool, uint64_t seed) {
  std::vector<uint8_t> used(pool.size(), 0);
  for (size_t i = 0; i < tmpl.panels.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    const Panel& p = tmpl.panels[i];
    if (p.kind == Panel::Kind::Photo) {
      int idx = pick_pool_image(pool, used, p.aspect());
      if (idx >= 0) {
        place_content(fig.image, p.rect, pool[idx].image);
        fig.panel_layout.push_back({p.rect, "filler", pool[idx].ref});
        continue;
      }
      // Pool exhausted: fall through to a fake graph.
    }
    place_content(fig.image, p.rect,
                  generate_fake_graph(p.rect.width(), p.rect.height(),
                                      Rng::derive(seed, 0x6000 + i)));
    fig.panel_layout.push_back({p.rect, "graph", "fake_graph"});
  }
}

}  // namespace

Template template_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("template JSON parse error: ") +
                                e.what());
  }
  if (!j.contains("canvas") || !j["canvas"].is_array() ||
      j["canvas"].size() != 2)
    throw std::invalid_argument("template: canvas must be [w,h]");
  Template t;
  t.canvas_w = j["canvas"][0].get<int>();
  t.canvas_h = j["canvas"][1].get<int>();
  if (t.canvas_w < 1 || t.canvas_h < 1)
    throw std::invalid_argument("template: canvas must be positive");
  if (!j.contains("panels") || !j["panels"].is_array() || j["panels"].empty())
    throw std::invalid_argument("template: panels missing");
  bool any_photo = false;
  for (const auto& pj : j["panels"]) {
    if (!pj.contains("rect") || !pj["rect"].is_array() ||
        pj["rect"].size() != 4)
      throw std::invalid_argument("template: panel rect must be [x0,y0,x1,y1]");
    Panel p;
    p.rect = {pj["rect"][0].get<int>(), pj["rect"][1].get<int>(),
              pj["rect"][2].get<int>(), pj["rect"][3].get<int>()};
    if (p.rect.empty() || p.rect.x0 < 0 || p.rect.y0 < 0 ||
        p.rect.x1 >= t.canvas_w || p.rect.y1 >= t.canvas_h)
      throw std::invalid_argument("template: panel outside canvas");
    std::string kind = pj.value("kind", "photo");
    if (kind == "photo") {
      p.kind = Panel::Kind::Photo;
      any_photo = true;
    } else if (kind == "graph") {
      p.kind = Panel::Kind::Graph;
    } else {
      throw std::invalid_argument("template: unknown panel kind " + kind);
    }
    t.panels.push_back(p);
  }
  for (size_t i = 0; i < t.panels.size(); ++i)
    for (size_t k = i + 1; k < t.panels.size(); ++k) {
      const Box& a = t.panels[i].rect;
      const Box& b = t.panels[k].rect;
      bool disjoint = a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0;
      if (!disjoint) throw std::invalid_argument("template: panels overlap");
    }
  if (!any_photo)
    throw std::invalid_argument("template: needs at least one photo panel");
  return t;
}

std::string template_to_json(const Template& t) {
  nlohmann::json j;
  j["canvas"] = {t.canvas_w, t.canvas_h};
  j["panels"] = nlohmann::json::array();
  for (const Panel& p : t.panels)
    j["panels"].push_back(
        {{"rect", {p.rect.x0, p.rect.y0, p.rect.x1, p.rect.y1}},
         {"kind", p.kind == Panel::Kind::Photo ? "photo" : "graph"}});
  return j.dump(2) + "\n";
}

TemplateChoice select_template(const std::vector<Template>& templates,
                               double source_aspect, double tol) {
  if (templates.empty()) throw std::invalid_argument("no templates");
  if (source_aspect <= 0.0)
    throw std::invalid_argument("aspect must be positive");
  TemplateChoice best;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t ti = 0; ti < templates.size(); ++ti)
    for (size_t pi = 0; pi < templates[ti].panels.size(); ++pi) {
      const Panel& p = templates[ti].panels[pi];
      if (p.kind != Panel::Kind::Photo) continue;
      double d = log_aspect_diff(p.aspect(), source_aspect);
      if (d < best_d) {
        best_d = d;
        best = {ti, pi};
      }
    }
  if (best_d > tol) throw std::runtime_error("no fitting template");
  return best;
}

Raster generate_fake_graph(int w, int h, uint64_t rng_seed) {
  if (w < 32 || h < 32)
    throw std::invalid_argument("graph must be at least 32x32");
  Rng rng(rng_seed);
  Raster g(w, h, 3, 255);

  const int left = w / 8, right = w - 1 - w / 20;
  const int top = h / 10, bottom = h - 1 - h / 8;
  auto set = [&](int x, int y, uint8_t r, uint8_t gr, uint8_t b) {
    if (!g.in_bounds(x, y)) return;
    g.at(x, y, 0) = r;
    g.at(x, y, 1) = gr;
    g.at(x, y, 2) = b;
  };
  for (int y = top; y <= bottom; ++y) set(left, y, 0, 0, 0);
  for (int x = left; x <= right; ++x) set(x, bottom, 0, 0, 0);

  const int n = 3 + static_cast<int>(rng.uniform(6));
  const uint8_t cr = static_cast<uint8_t>(rng.uniform(180));
  const uint8_t cg = static_cast<uint8_t>(rng.uniform(180));
  const uint8_t cb = static_cast<uint8_t>(rng.uniform(180));
  const int plot_w = right - left - 2, plot_h = bottom - top - 2;

  if (rng.coin()) {  // bar chart
    const int slot = plot_w / n;
    const int bar_w = std::max(1, slot / 2);
    for (int i = 0; i < n; ++i) {
      int bh = 1 + static_cast<int>(rng.uniform(std::max(1, plot_h)));
      int x0 = left + 1 + i * slot + (slot - bar_w) / 2;
      for (int y = bottom - bh; y < bottom; ++y)
        for (int x = x0; x < x0 + bar_w; ++x) set(x, y, cr, cg, cb);
    }
  } else {  // line chart with point markers
    std::vector<Pixel> pts;
    for (int i = 0; i < n; ++i) {
      int x = left + 1 + (n == 1 ? 0 : i * plot_w / (n - 1));
      int y = top + 1 + static_cast<int>(rng.uniform(std::max(1, plot_h)));
      pts.push_back({x, y});
    }
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      int x0 = pts[i].x, y0 = pts[i].y, x1 = pts[i + 1].x, y1 = pts[i + 1].y;
      int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
      for (int s = 0; s <= steps; ++s) {
        int x = x0 + (steps == 0 ? 0 : (x1 - x0) * s / steps);
        int y = y0 + (steps == 0 ? 0 : (y1 - y0) * s / steps);
        set(x, y, cr, cg, cb);
      }
    }
    for (const Pixel& p : pts)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) set(p.x + dx, p.y + dy, cr, cg, cb);
  }
  return g;
}

void add_indicative_letters(CompoundFigure& fig, int level, uint64_t rng_seed) {
  if (level < 1 || level > 3)
    throw std::invalid_argument("verbosity level must be 1, 2 or 3");

  // Each level draws with its own derived seed so that the overlays of
  // level k are exactly the overlays of level k-1 plus the new ones.
  for (size_t i = 0; i < fig.panel_layout.size(); ++i) {
    const Box& r = fig.panel_layout[i].rect;
    int s = text_scale(r.height());
    std::string tag = "(";
    tag.push_back(static_cast<char>('a' + i % 26));
    tag += ")";
    int h = text_height(s);
    int y = r.y0 - h - 2 >= 0 ? r.y0 - h - 2 : r.y0 + 2;
    place_text(fig, tag, r.x0, y, s, 1);
  }
  if (level >= 2) {
    Rng rng(Rng::derive(rng_seed, 2));
    for (const PanelPlacement& p : fig.panel_layout) {
      const Box& r = p.rect;
      int s = text_scale(r.height());
      std::string word = random_word(rng);
      int h = text_height(s);
      int y = r.y1 + h + 2 < fig.image.height ? r.y1 + 3 : r.y1 - h - 2;
      int max_off = std::max(1, r.width() - text_width(word, s));
      int x = r.x0 + static_cast<int>(rng.uniform(max_off));
      place_text(fig, word, x, y, s, 2);
    }
  }
  if (level >= 3) {
    for (size_t i = 0; i < fig.panel_layout.size(); ++i) {
      const Box& r = fig.panel_layout[i].rect;
      int s = text_scale(r.height());
      std::string letter(1, static_cast<char>('a' + i % 26));
      int x = (r.x0 + r.x1) / 2 - text_width(letter, s) / 2;
      int y = (r.y0 + r.y1) / 2 - text_height(s) / 2;
      place_text(fig, letter, x, y, s, 3);
    }
  }
  fig.verbosity = level;
}

CompoundFigure build_compound_intra(const std::vector<Template>& templates,
                                    const SourceImage& source,
                                    const std::string& forgery_submodality,
                                    const std::vector<SourceImage>& fill_pool,
                                    int verbosity, uint64_t rng_seed) {
  const auto& registry = forge::default_registry();
  auto it = registry.find(forgery_submodality);
  if (it == registry.end())
    throw std::invalid_argument("unknown forgery submodality: " +
                                forgery_submodality);
  const double aspect =
      static_cast<double>(source.image.width) / source.image.height;
  const TemplateChoice choice = select_template(templates, aspect);
  const Template& tmpl = templates[choice.template_index];

  forge::ForgeryOutput fo =
      it->second(source.image, source.objects, Rng::derive(rng_seed, 1));

  CompoundFigure fig;
  fig.image = blank_canvas(tmpl);
  fig.gt = LabelMap(tmpl.canvas_w, tmpl.canvas_h, 0);
  fig.modality = "intra_panel";
  fig.submodality = forgery_submodality;
  fig.seed = rng_seed;
  fig.params = fo.params;
  fig.params["template_index"] = std::to_string(choice.template_index);
  fig.params["panel_index"] = std::to_string(choice.panel_index);

  const Panel& forged_panel = tmpl.panels[choice.panel_index];
  place_content(fig.image, forged_panel.rect, fo.image);
  place_labels(fig.gt, forged_panel.rect, fo.gt);
  fig.panel_layout.push_back({forged_panel.rect, "forged", source.ref});

  fill_other_panels(fig, tmpl, choice.panel_index, choice.panel_index,
                    fill_pool, rng_seed);
  std::sort(fig.panel_layout.begin(), fig.panel_layout.end(),
            [](const PanelPlacement& a, const PanelPlacement& b) {
              return std::tie(a.rect.y0, a.rect.x0) <
                     std::tie(b.rect.y0, b.rect.x0);
            });

  if (verbosity >= 1)
    add_indicative_letters(fig, std::min(verbosity, 3),
                           Rng::derive(rng_seed, 7));
  return fig;
}

std::string inter_submodality(InterMode mode, PanelTransform t) {
  if (mode == InterMode::Splicing) return "splicing";
  if (mode == InterMode::Overlap) return "overlap";
  switch (t) {
    case PanelTransform::None: return "none";
    case PanelTransform::Flip: return "flip";
    case PanelTransform::Rotation90: return "rotation90";
    case PanelTransform::Rotation180: return "rotation180";
    case PanelTransform::FlipRotation90: return "flip+rotation90";
    case PanelTransform::Retouching: return "retouching";
  }
  return "?";
}

CompoundFigure build_compound_inter(
    const std::vector<Template>& templates,
    const std::vector<SourceImage>& sources, InterMode mode,
    PanelTransform transform, const std::optional<forge::RetouchSpec>& post,
    const std::vector<SourceImage>& fill_pool, int verbosity,
    uint64_t rng_seed) {
  if (sources.empty()) throw std::invalid_argument("no source images");
  if (mode == InterMode::Splicing && sources.size() < 2)
    throw std::invalid_argument("splicing needs a donor and a host source");

  const bool transposed = mode == InterMode::PanelDuplication &&
                          (transform == PanelTransform::Rotation90 ||
                           transform == PanelTransform::FlipRotation90);
  // Candidate (template, panel a, panel b) triples with compatible shapes.
  struct Candidate {
    size_t t, a, b;
  };
  std::vector<Candidate> candidates;
  for (size_t ti = 0; ti < templates.size(); ++ti) {
    const auto& panels = templates[ti].panels;
    for (size_t a = 0; a < panels.size(); ++a) {
      if (panels[a].kind != Panel::Kind::Photo) continue;
      for (size_t b = 0; b < panels.size(); ++b) {
        if (b == a || panels[b].kind != Panel::Kind::Photo) continue;
        const Box& ra = panels[a].rect;
        const Box& rb = panels[b].rect;
        bool ok;
        if (mode == InterMode::Splicing) {
          ok = true;
        } else if (transposed) {
          ok = ra.width() == rb.height() && ra.height() == rb.width();
        } else {
          ok = ra.width() == rb.width() && ra.height() == rb.height();
        }
        if (ok && (transposed || a < b)) candidates.push_back({ti, a, b});
      }
    }
  }
  if (candidates.empty())
    throw std::runtime_error("fewer than 2 compatible panels");

  Rng rng(rng_seed);
  const Candidate cand = candidates[rng.uniform(candidates.size())];
  const Template& tmpl = templates[cand.t];
  const Box& ra = tmpl.panels[cand.a].rect;
  const Box& rb = tmpl.panels[cand.b].rect;

  CompoundFigure fig;
  fig.image = blank_canvas(tmpl);
  fig.gt = LabelMap(tmpl.canvas_w, tmpl.canvas_h, 0);
  fig.modality = "inter_panel";
  fig.submodality = inter_submodality(mode, transform);
  fig.seed = rng_seed;
  fig.params["template_index"] = std::to_string(cand.t);
  fig.params["panel_a"] = std::to_string(cand.a);
  fig.params["panel_b"] = std::to_string(cand.b);

  if (mode == InterMode::PanelDuplication) {
    const SourceImage& src = sources[0];
    Raster content_a = fit_to(src.image, ra.width(), ra.height());
    Raster content_b;
    switch (transform) {
      case PanelTransform::None:
      case PanelTransform::Retouching:
        content_b = content_a;
        break;
      case PanelTransform::Flip:
        content_b = flip_h(content_a);
        break;
      case PanelTransform::Rotation90:
        content_b = rot90(content_a);
        break;
      case PanelTransform::Rotation180:
        content_b = rot180(content_a);
        break;
      case PanelTransform::FlipRotation90:
        content_b = rot90(flip_h(content_a));
        break;
    }
    if (transform == PanelTransform::Retouching) {
      forge::RetouchSpec spec;
      if (post) {
        spec = *post;
      } else {
        spec.kind = forge::RetouchSpec::Kind::Contrast;
        spec.gain = rng.uniform_real(0.6, 1.6);
        spec.bias = rng.uniform_real(-40.0, 40.0);
      }
      LabelMap whole(content_b.width, content_b.height, 1);
      forge::ForgeryOutput r =
          spec.kind == forge::RetouchSpec::Kind::Blur
              ? forge::retouch_blur(content_b, whole, {1}, spec.sigma, 0)
              : forge::retouch_contrast(content_b, whole, {1}, spec.gain,
                                        spec.bias, 0);
      content_b = r.image;
      fig.params["post"] = spec.kind == forge::RetouchSpec::Kind::Blur
                               ? "blur"
                               : "contrast";
    }
    place_content(fig.image, ra, content_a);
    place_content(fig.image, rb, content_b);
    for (int y = ra.y0; y <= ra.y1; ++y)
      for (int x = ra.x0; x <= ra.x1; ++x) fig.gt.at(x, y) = 1;
    for (int y = rb.y0; y <= rb.y1; ++y)
      for (int x = rb.x0; x <= rb.x1; ++x) fig.gt.at(x, y) = 1;
    fig.panel_layout.push_back({ra, "forged", src.ref});
    fig.panel_layout.push_back({rb, "forged", src.ref});
  } else if (mode == InterMode::Splicing) {
    const SourceImage& donor = sources[0];
    const SourceImage& host = sources[1];
    if (donor.objects.distinct_ids().empty())
      throw std::invalid_argument("donor has no objects");
    Raster donor_img = fit_to(donor.image, ra.width(), ra.height());
    LabelMap donor_obj =
        raster::resize_nearest(donor.objects, ra.width(), ra.height());
    Raster host_img = fit_to(host.image, rb.width(), rb.height());
    LabelMap host_obj =
        raster::resize_nearest(host.objects, rb.width(), rb.height());

    const std::vector<uint16_t> ids = donor_obj.distinct_ids();
    if (ids.empty()) throw std::runtime_error("donor object vanished in resize");
    const uint16_t donor_id = ids[rng.uniform(ids.size())];
    const PixelSet mask = donor_obj.pixels_with_id(donor_id);
    const std::vector<Pixel> offsets =
        forge::background_placements(host_obj, mask, 4);
    if (offsets.empty())
      throw std::runtime_error("no background placement for donor object");
    const Pixel off = offsets[rng.uniform(offsets.size())];
    for (const Pixel& p : mask)
      for (int c = 0; c < 3; ++c)
        host_img.at(p.x + off.x, p.y + off.y, c) = donor_img.at(p.x, p.y, c);

    place_content(fig.image, ra, donor_img);
    place_content(fig.image, rb, host_img);
    for (const Pixel& p : mask) {
      fig.gt.at(ra.x0 + p.x, ra.y0 + p.y) = 1;
      fig.gt.at(rb.x0 + p.x + off.x, rb.y0 + p.y + off.y) = 1;
    }
    fig.panel_layout.push_back({ra, "forged", donor.ref});
    fig.panel_layout.push_back({rb, "forged", host.ref});
  } else {  // Overlap
    const SourceImage& src = sources[0];
    // Work on a source large enough that both shifted crops fit.
    Raster big = fit_to(src.image, 2 * ra.width(), 2 * ra.height());
    forge::OverlapPair pair = forge::overlap_split(
        big, ra.width(), ra.height(), 0.5, post, Rng::derive(rng_seed, 3));
    place_content(fig.image, ra, pair.image_a);
    place_content(fig.image, rb, pair.image_b);
    place_labels(fig.gt, ra, pair.gt_a);
    place_labels(fig.gt, rb, pair.gt_b);
    fig.panel_layout.push_back({ra, "forged", src.ref});
    fig.panel_layout.push_back({rb, "forged", src.ref});
  }

  fill_other_panels(fig, tmpl, cand.a, cand.b, fill_pool, rng_seed);
  std::sort(fig.panel_layout.begin(), fig.panel_layout.end(),
            [](const PanelPlacement& a, const PanelPlacement& b) {
              return std::tie(a.rect.y0, a.rect.x0) <
                     std::tie(b.rect.y0, b.rect.x0);
            });

  if (verbosity >= 1)
    add_indicative_letters(fig, std::min(verbosity, 3),
                           Rng::derive(rng_seed, 7));
  return fig;
}

}  // namespace sciforge::compound
