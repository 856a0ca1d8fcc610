#pragma once

#include "clickqa/overlay.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace streamcart::clickqa {

// 8-bit RGBA, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgba;

  Image() = default;
  Image(int w, int h, uint32_t fill_rgba = 0x000000FF);

  uint8_t* pixel(int x, int y) { return rgba.data() + (static_cast<size_t>(y) * width + x) * 4; }
  const uint8_t* pixel(int x, int y) const {
    return rgba.data() + (static_cast<size_t>(y) * width + x) * 4;
  }
  bool operator==(const Image&) const = default;
};

struct CursorIcon {
  Image image;
  int hotspot_x = 0;
  int hotspot_y = 0;
};

// Arrow pointer, 12x19, tip at (0, 0). Pixels are fully opaque or fully clear.
CursorIcon default_cursor();

// Copy of `frame` with the icon alpha-blended so its hotspot sits on the
// click; the icon is clipped at the frame edges.
Image compose_visual_prompt(const Image& frame, const ClickEvent& click, const CursorIcon& cursor);

// Rectangle the icon occupies for a click, before clipping.
BBox cursor_placement(const ClickEvent& click, const CursorIcon& cursor);

// Flat frame with each message box outlined; stands in for a captured frame
// when only overlay geometry is available.
Image render_overlay(const FrameOverlay& overlay);

std::vector<uint8_t> encode_png(const Image& img);
std::string base64_encode(const std::vector<uint8_t>& bytes);

} // namespace streamcart::clickqa
