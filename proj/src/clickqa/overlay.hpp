#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace streamcart::clickqa {

// Pixel rectangle, half-open: covers x in [x_min, x_max), y in [y_min, y_max).
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool contains(int x, int y) const { return x >= x_min && x < x_max && y >= y_min && y < y_max; }
  bool intersects(const BBox& o) const {
    return x_min < o.x_max && o.x_min < x_max && y_min < o.y_max && o.y_min < y_max;
  }
  double center_x() const { return (x_min + x_max) / 2.0; }
  double center_y() const { return (y_min + y_max) / 2.0; }
  // Euclidean distance from (x, y) to the nearest covered pixel.
  double distance_to(int x, int y) const;
  bool operator==(const BBox&) const = default;
};

struct BulletMessage {
  std::string message_id;
  std::string text;
  BBox bbox;
  bool operator==(const BulletMessage&) const = default;
};

struct FrameOverlay {
  int64_t frame_id = 0;
  int width = 0;
  int height = 0;
  std::vector<BulletMessage> messages;

  void validate() const;
  bool operator==(const FrameOverlay&) const = default;
};

struct ClickEvent {
  int64_t frame_id = 0;
  int x = 0;
  int y = 0;
  bool operator==(const ClickEvent&) const = default;
};

inline constexpr double kDefaultClickRadius = 24.0;

// Message under the click. Among messages containing the click, the one with
// the nearest bbox centre wins; with none containing it, the nearest-centre
// message whose box lies within `radius` pixels. Remaining ties go to the
// lowest message_id. Throws kNoMessage with diagnostics when nothing is close.
const BulletMessage& resolve_click(const FrameOverlay& overlay, const ClickEvent& click,
                                   double radius = kDefaultClickRadius);

void to_json(nlohmann::json& j, const BBox& b);
void from_json(const nlohmann::json& j, BBox& b);
void to_json(nlohmann::json& j, const BulletMessage& m);
void from_json(const nlohmann::json& j, BulletMessage& m);
void to_json(nlohmann::json& j, const FrameOverlay& o);
void from_json(const nlohmann::json& j, FrameOverlay& o);
void to_json(nlohmann::json& j, const ClickEvent& c);
void from_json(const nlohmann::json& j, ClickEvent& c);

FrameOverlay read_overlay_file(const std::string& path);
void write_overlay_file(const std::string& path, const FrameOverlay& overlay);

} // namespace streamcart::clickqa
