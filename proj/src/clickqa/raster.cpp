#include "clickqa/raster.hpp"

#include "common/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <string_view>

namespace streamcart::clickqa {

Image::Image(int w, int h, uint32_t fill_rgba) : width(w), height(h) {
  if (w <= 0 || h <= 0) fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  rgba.resize(static_cast<size_t>(w) * h * 4);
  for (size_t i = 0; i < rgba.size(); i += 4) {
    rgba[i] = static_cast<uint8_t>(fill_rgba >> 24);
    rgba[i + 1] = static_cast<uint8_t>(fill_rgba >> 16);
    rgba[i + 2] = static_cast<uint8_t>(fill_rgba >> 8);
    rgba[i + 3] = static_cast<uint8_t>(fill_rgba);
  }
}

CursorIcon default_cursor() {
  // '#' outline, '.' fill, ' ' transparent.
  static constexpr std::array<std::string_view, 19> kShape = {
      "#           ", "##          ", "#.#         ", "#..#        ", "#...#       ",
      "#....#      ", "#.....#     ", "#......#    ", "#.......#   ", "#........#  ",
      "#.........# ", "#..........#", "#......#####", "#...#..#    ", "#..# #..#   ",
      "#.#  #..#   ", "##    #..#  ", "      #..#  ", "       ##   ",
  };
  CursorIcon c;
  c.image = Image(12, 19, 0x00000000);
  for (int y = 0; y < 19; ++y) {
    for (int x = 0; x < 12; ++x) {
      uint8_t* p = c.image.pixel(x, y);
      const char ch = kShape[static_cast<size_t>(y)][static_cast<size_t>(x)];
      if (ch == '#') {
        p[0] = p[1] = p[2] = 0;
        p[3] = 255;
      } else if (ch == '.') {
        p[0] = p[1] = p[2] = 255;
        p[3] = 255;
      }
    }
  }
  return c;
}

BBox cursor_placement(const ClickEvent& click, const CursorIcon& cursor) {
  const int x0 = click.x - cursor.hotspot_x;
  const int y0 = click.y - cursor.hotspot_y;
  return {x0, y0, x0 + cursor.image.width, y0 + cursor.image.height};
}

Image compose_visual_prompt(const Image& frame, const ClickEvent& click, const CursorIcon& cursor) {
  if (cursor.image.width > frame.width || cursor.image.height > frame.height)
    fail(ErrorCode::kValidation, "cursor icon larger than frame");
  if (click.x < 0 || click.y < 0 || click.x >= frame.width || click.y >= frame.height)
    fail(ErrorCode::kValidation, "click outside image bounds");

  Image out = frame;
  const BBox place = cursor_placement(click, cursor);
  const int x_lo = std::max(place.x_min, 0);
  const int y_lo = std::max(place.y_min, 0);
  const int x_hi = std::min(place.x_max, frame.width);
  const int y_hi = std::min(place.y_max, frame.height);
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) {
      const uint8_t* src = cursor.image.pixel(x - place.x_min, y - place.y_min);
      uint8_t* dst = out.pixel(x, y);
      const unsigned a = src[3];
      if (a == 0) continue;
      for (int c = 0; c < 3; ++c) {
        dst[c] = static_cast<uint8_t>((src[c] * a + dst[c] * (255 - a) + 127) / 255);
      }
      dst[3] = static_cast<uint8_t>(a + (dst[3] * (255 - a) + 127) / 255);
    }
  }
  return out;
}

Image render_overlay(const FrameOverlay& overlay) {
  Image img(overlay.width, overlay.height, 0x202020FF);
  for (const auto& m : overlay.messages) {
    const auto& b = m.bbox;
    for (int y = std::max(b.y_min, 0); y < std::min(b.y_max, img.height); ++y) {
      for (int x = std::max(b.x_min, 0); x < std::min(b.x_max, img.width); ++x) {
        const bool edge = x == b.x_min || y == b.y_min || x == b.x_max - 1 || y == b.y_max - 1;
        uint8_t* p = img.pixel(x, y);
        const uint8_t v = edge ? 230 : 90;
        p[0] = p[1] = p[2] = v;
      }
    }
  }
  return img;
}

std::vector<uint8_t> encode_png(const Image& img) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width);
  desc.height = static_cast<png_uint_32>(img.height);
  desc.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, img.rgba.data(), 0, nullptr))
    fail(ErrorCode::kInternal, std::string("PNG encode failed: ") + desc.message);
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, img.rgba.data(), 0, nullptr))
    fail(ErrorCode::kInternal, std::string("PNG encode failed: ") + desc.message);
  out.resize(size);
  return out;
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

} // namespace streamcart::clickqa
