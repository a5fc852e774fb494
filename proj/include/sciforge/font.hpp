#pragma once

#include <cstdint>

namespace sciforge::font {

// Fixed bitmap font covering 'a'..'z', '(' and ')'. Each glyph is 8x8;
// renderers double rows vertically for an 8x16 cell. Bit 7 of each row
// byte is the leftmost pixel.
inline constexpr int kGlyphWidth = 8;
inline constexpr int kGlyphHeight = 8;
inline constexpr int kAdvance = 6;  // glyphs use 5 columns + 1 spacing

// Returns the 8 row bytes for a supported character, nullptr otherwise.
const uint8_t* glyph(char c);

}  // namespace sciforge::font
