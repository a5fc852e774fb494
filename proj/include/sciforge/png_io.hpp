#pragma once

#include <string>

#include "sciforge/raster.hpp"

namespace sciforge::png_io {

// Loads an 8-bit PNG; grayscale inputs are promoted to 3 channels so every
// operation has one code path. 16-bit files are downscaled to 8 bit.
raster::Raster read_image(const std::string& path);

// Loads a PNG as a single-channel 8-bit raster (soft detection maps).
raster::Raster read_gray(const std::string& path);

void write_image(const raster::Raster& image, const std::string& path);

// Label maps are stored as 16-bit grayscale PNG, sample value = region ID.
// The round trip is lossless. 8-bit grayscale files are accepted on read.
raster::LabelMap read_label_map(const std::string& path);
void write_label_map(const raster::LabelMap& map, const std::string& path);

// Bit depth of the first image channel in the file (8 or 16).
int probe_bit_depth(const std::string& path);

// Non-authoritative colorized preview of a label map: palette by ID,
// ID 0 rendered dark purple.
void write_label_preview(const raster::LabelMap& map, const std::string& path);

}  // namespace sciforge::png_io
