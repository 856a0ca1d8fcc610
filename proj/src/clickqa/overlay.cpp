#include "clickqa/overlay.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

namespace streamcart::clickqa {

double BBox::distance_to(int x, int y) const {
  const double dx = std::max({static_cast<double>(x_min - x), 0.0, static_cast<double>(x - (x_max - 1))});
  const double dy = std::max({static_cast<double>(y_min - y), 0.0, static_cast<double>(y - (y_max - 1))});
  return std::hypot(dx, dy);
}

void FrameOverlay::validate() const {
  if (width <= 0 || height <= 0) fail(ErrorCode::kValidation, "overlay dimensions must be positive");
  std::set<std::string> ids;
  for (const auto& m : messages) {
    if (m.text.empty()) fail(ErrorCode::kValidation, "message '" + m.message_id + "' has empty text");
    const auto& b = m.bbox;
    if (b.x_min >= b.x_max || b.y_min >= b.y_max)
      fail(ErrorCode::kValidation, "message '" + m.message_id + "' has a degenerate bbox");
    if (b.x_min < 0 || b.y_min < 0 || b.x_max > width || b.y_max > height)
      fail(ErrorCode::kValidation, "message '" + m.message_id + "' bbox exceeds the frame");
    if (!ids.insert(m.message_id).second)
      fail(ErrorCode::kValidation, "duplicate message_id '" + m.message_id + "'");
  }
}

const BulletMessage& resolve_click(const FrameOverlay& overlay, const ClickEvent& click,
                                   double radius) {
  if (click.frame_id != overlay.frame_id) {
    fail(ErrorCode::kValidation, "click frame " + std::to_string(click.frame_id) +
                                     " does not match overlay frame " +
                                     std::to_string(overlay.frame_id));
  }
  if (click.x < 0 || click.y < 0 || click.x >= overlay.width || click.y >= overlay.height)
    fail(ErrorCode::kValidation, "click outside frame bounds");

  auto center_distance = [&](const BulletMessage& m) {
    return std::hypot(m.bbox.center_x() - click.x, m.bbox.center_y() - click.y);
  };
  auto better = [&](const BulletMessage* a, const BulletMessage* b) {
    const double da = center_distance(*a);
    const double db = center_distance(*b);
    if (da != db) return da < db;
    return a->message_id < b->message_id;
  };

  const BulletMessage* best_inside = nullptr;
  const BulletMessage* best_near = nullptr;
  const BulletMessage* nearest_any = nullptr;
  for (const auto& m : overlay.messages) {
    if (m.bbox.contains(click.x, click.y)) {
      if (!best_inside || better(&m, best_inside)) best_inside = &m;
    } else if (m.bbox.distance_to(click.x, click.y) <= radius) {
      if (!best_near || better(&m, best_near)) best_near = &m;
    }
    if (!nearest_any || m.bbox.distance_to(click.x, click.y) <
                            nearest_any->bbox.distance_to(click.x, click.y)) {
      nearest_any = &m;
    }
  }
  if (best_inside) return *best_inside;
  if (best_near) return *best_near;

  std::string diag = "no message at click (" + std::to_string(click.x) + ", " +
                     std::to_string(click.y) + ")";
  if (nearest_any) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", nearest_any->bbox.distance_to(click.x, click.y));
    diag += "; nearest candidate '" + nearest_any->message_id + "' at " + buf + " px";
  } else {
    diag += "; overlay has no messages";
  }
  fail(ErrorCode::kNoMessage, diag);
}

void to_json(nlohmann::json& j, const BBox& b) { j = {b.x_min, b.y_min, b.x_max, b.y_max}; }

void from_json(const nlohmann::json& j, BBox& b) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::kParse, "bbox must be [x0, y0, x1, y1]");
  b = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void to_json(nlohmann::json& j, const BulletMessage& m) {
  j = {{"message_id", m.message_id}, {"text", m.text}, {"bbox", m.bbox}};
}

void from_json(const nlohmann::json& j, BulletMessage& m) {
  m.message_id = j.at("message_id").get<std::string>();
  m.text = j.at("text").get<std::string>();
  m.bbox = j.at("bbox").get<BBox>();
}

void to_json(nlohmann::json& j, const FrameOverlay& o) {
  j = {{"frame_id", o.frame_id}, {"width", o.width}, {"height", o.height}, {"messages", o.messages}};
}

void from_json(const nlohmann::json& j, FrameOverlay& o) {
  o.frame_id = j.at("frame_id").get<int64_t>();
  o.width = j.at("width").get<int>();
  o.height = j.at("height").get<int>();
  o.messages = j.value("messages", std::vector<BulletMessage>{});
}

void to_json(nlohmann::json& j, const ClickEvent& c) {
  j = {{"frame_id", c.frame_id}, {"x", c.x}, {"y", c.y}};
}

void from_json(const nlohmann::json& j, ClickEvent& c) {
  c.frame_id = j.at("frame_id").get<int64_t>();
  c.x = j.at("x").get<int>();
  c.y = j.at("y").get<int>();
}

FrameOverlay read_overlay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open overlay file: " + path);
  try {
    auto o = nlohmann::json::parse(in).get<FrameOverlay>();
    o.validate();
    return o;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
}

void write_overlay_file(const std::string& path, const FrameOverlay& overlay) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write overlay file: " + path);
  out << nlohmann::json(overlay).dump() << "\n";
}

} // namespace streamcart::clickqa
