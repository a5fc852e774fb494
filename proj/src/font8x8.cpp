#include "sciforge/font.hpp"

#include <array>
#include <mutex>

namespace sciforge::font {

namespace {

struct GlyphDef {
  char c;
  const char* rows[8];  // '#' = set pixel
};

// clang-format off
const GlyphDef kDefs[] = {
  {'a', {"........",
         "........",
         ".###....",
         "....#...",
         ".####...",
         "#...#...",
         ".####...",
         "........"}},
  {'b', {"#.......",
         "#.......",
         "####....",
         "#...#...",
         "#...#...",
         "#...#...",
         "####....",
         "........"}},
  {'c', {"........",
         "........",
         ".###....",
         "#.......",
         "#.......",
         "#.......",
         ".###....",
         "........"}},
  {'d', {"....#...",
         "....#...",
         ".####...",
         "#...#...",
         "#...#...",
         "#...#...",
         ".####...",
         "........"}},
  {'e', {"........",
         "........",
         ".###....",
         "#...#...",
         "#####...",
         "#.......",
         ".###....",
         "........"}},
  {'f', {"..##....",
         ".#......",
         "####....",
         ".#......",
         ".#......",
         ".#......",
         ".#......",
         "........"}},
  {'g', {"........",
         "........",
         ".####...",
         "#...#...",
         "#...#...",
         ".####...",
         "....#...",
         ".###...."}},
  {'h', {"#.......",
         "#.......",
         "####....",
         "#...#...",
         "#...#...",
         "#...#...",
         "#...#...",
         "........"}},
  {'i', {"..#.....",
         "........",
         "..#.....",
         "..#.....",
         "..#.....",
         "..#.....",
         "..#.....",
         "........"}},
  {'j', {"...#....",
         "........",
         "...#....",
         "...#....",
         "...#....",
         "...#....",
         "#..#....",
         ".##....."}},
  {'k', {"#.......",
         "#.......",
         "#..#....",
         "#.#.....",
         "##......",
         "#.#.....",
         "#..#....",
         "........"}},
  {'l', {".#......",
         ".#......",
         ".#......",
         ".#......",
         ".#......",
         ".#......",
         "..##....",
         "........"}},
  {'m', {"........",
         "........",
         "##.##...",
         "#.#.#...",
         "#.#.#...",
         "#.#.#...",
         "#.#.#...",
         "........"}},
  {'n', {"........",
         "........",
         "####....",
         "#...#...",
         "#...#...",
         "#...#...",
         "#...#...",
         "........"}},
  {'o', {"........",
         "........",
         ".###....",
         "#...#...",
         "#...#...",
         "#...#...",
         ".###....",
         "........"}},
  {'p', {"........",
         "........",
         "####....",
         "#...#...",
         "#...#...",
         "####....",
         "#.......",
         "#......."}},
  {'q', {"........",
         "........",
         ".####...",
         "#...#...",
         "#...#...",
         ".####...",
         "....#...",
         "....#..."}},
  {'r', {"........",
         "........",
         "#.##....",
         "##......",
         "#.......",
         "#.......",
         "#.......",
         "........"}},
  {'s', {"........",
         "........",
         ".####...",
         "#.......",
         ".###....",
         "....#...",
         "####....",
         "........"}},
  {'t', {".#......",
         ".#......",
         "####....",
         ".#......",
         ".#......",
         ".#......",
         "..##....",
         "........"}},
  {'u', {"........",
         "........",
         "#...#...",
         "#...#...",
         "#...#...",
         "#...#...",
         ".####...",
         "........"}},
  {'v', {"........",
         "........",
         "#...#...",
         "#...#...",
         "#...#...",
         ".#.#....",
         "..#.....",
         "........"}},
  {'w', {"........",
         "........",
         "#.#.#...",
         "#.#.#...",
         "#.#.#...",
         "#.#.#...",
         ".#.#....",
         "........"}},
  {'x', {"........",
         "........",
         "#...#...",
         ".#.#....",
         "..#.....",
         ".#.#....",
         "#...#...",
         "........"}},
  {'y', {"........",
         "........",
         "#...#...",
         "#...#...",
         "#...#...",
         ".####...",
         "....#...",
         ".###...."}},
  {'z', {"........",
         "........",
         "#####...",
         "...#....",
         "..#.....",
         ".#......",
         "#####...",
         "........"}},
  {'(', {"...#....",
         "..#.....",
         ".#......",
         ".#......",
         ".#......",
         ".#......",
         "..#.....",
         "...#...."}},
  {')', {".#......",
         "..#.....",
         "...#....",
         "...#....",
         "...#....",
         "...#....",
         "..#.....",
         ".#......"}},
};
// clang-format on

struct FontTable {
  std::array<std::array<uint8_t, 8>, 128> rows{};
  std::array<bool, 128> present{};
  FontTable() {
    for (const GlyphDef& def : kDefs) {
      auto& g = rows[static_cast<unsigned char>(def.c)];
      for (int y = 0; y < 8; ++y) {
        uint8_t bits = 0;
        for (int x = 0; x < 8; ++x)
          if (def.rows[y][x] == '#') bits |= static_cast<uint8_t>(0x80u >> x);
        g[y] = bits;
      }
      present[static_cast<unsigned char>(def.c)] = true;
    }
  }
};

}  // namespace

const uint8_t* glyph(char c) {
  static const FontTable table;
  auto idx = static_cast<unsigned char>(c);
  if (idx >= 128 || !table.present[idx]) return nullptr;
  return table.rows[idx].data();
}

}  // namespace sciforge::font
