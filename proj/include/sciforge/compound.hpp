#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sciforge/forge.hpp"
#include "sciforge/raster.hpp"

namespace sciforge::compound {

using raster::Box;
using raster::LabelMap;
using raster::Raster;

struct Panel {
  enum class Kind { Photo, Graph };
  Box rect;  // inclusive, in canvas coordinates
  Kind kind = Kind::Photo;
  double aspect() const {
    return static_cast<double>(rect.width()) / rect.height();
  }
};

struct Template {
  int canvas_w = 0;
  int canvas_h = 0;
  std::vector<Panel> panels;
};

// Parses and validates {"canvas":[w,h],"panels":[{"rect":[x0,y0,x1,y1],
// "kind":"photo"|"graph"},...]}. Panels must be non-overlapping, inside the
// canvas, and include at least one photo panel.
Template template_from_json(const std::string& json_text);
std::string template_to_json(const Template& t);

struct PanelPlacement {
  Box rect;
  std::string role;        // forged | filler | graph
  std::string source_ref;  // pool index, source id, or "fake_graph"
};

struct TextBox {
  Box rect;
  std::string text;
  int level = 1;
};

struct CompoundFigure {
  Raster image;
  LabelMap gt;
  std::vector<PanelPlacement> panel_layout;
  std::vector<TextBox> text_boxes;
  int verbosity = 0;
  std::string modality;     // intra_panel | inter_panel
  std::string submodality;  // forgery op, duplication transform, ...
  forge::Params params;
  uint64_t seed = 0;
};

struct TemplateChoice {
  size_t template_index = 0;
  size_t panel_index = 0;
};

// Photo panel whose aspect ratio minimizes |log(panel_ar) - log(source_ar)|
// across all templates; a minimum above tol is rejected.
TemplateChoice select_template(const std::vector<Template>& templates,
                               double source_aspect, double tol = 0.25);

// Seeded bar or line chart on a white background. w, h >= 32.
Raster generate_fake_graph(int w, int h, uint64_t rng_seed);

// Overlays indicative letters for verbosity levels 1..level cumulatively:
// level 1 tags each panel "(a)", "(b)", ...; level 2 adds a random word per
// panel; level 3 adds a letter inside each panel. Text never touches gt.
void add_indicative_letters(CompoundFigure& fig, int level, uint64_t rng_seed);

struct SourceImage {
  Raster image;
  LabelMap objects;
  std::string ref;  // identifier recorded in the layout/metadata
};

// One forged panel (copy-move, cleaning or retouching via the forgery
// registry), remaining photo panels filled from the pool (nearest aspect,
// each pool image at most once), graph panels filled with fake graphs.
CompoundFigure build_compound_intra(const std::vector<Template>& templates,
                                    const SourceImage& source,
                                    const std::string& forgery_submodality,
                                    const std::vector<SourceImage>& fill_pool,
                                    int verbosity, uint64_t rng_seed);

enum class InterMode { PanelDuplication, Splicing, Overlap };

// Panel-duplication transform set used across panels.
enum class PanelTransform { None, Flip, Rotation90, Rotation180,
                            FlipRotation90, Retouching };

std::string inter_submodality(InterMode mode, PanelTransform t);

// Forgery spanning two panels: whole-panel duplication (optionally
// transformed or retouched), an object spliced across panels, or two
// overlapping crops of one source.
CompoundFigure build_compound_inter(const std::vector<Template>& templates,
                                    const std::vector<SourceImage>& sources,
                                    InterMode mode, PanelTransform transform,
                                    const std::optional<forge::RetouchSpec>& post,
                                    const std::vector<SourceImage>& fill_pool,
                                    int verbosity, uint64_t rng_seed);

}  // namespace sciforge::compound
