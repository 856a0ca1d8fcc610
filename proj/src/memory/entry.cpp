#include "memory/entry.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

namespace streamcart::memory {

const char* caption_source_name(CaptionSource s) {
  return s == CaptionSource::kFresh ? "fresh" : "prefix-reused";
}

CaptionSource parse_caption_source(std::string_view s) {
  if (s == "fresh") return CaptionSource::kFresh;
  if (s == "prefix-reused") return CaptionSource::kPrefixReused;
  fail(ErrorCode::kParse, "unknown caption source '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const MemoryEntry& e) {
  j = {{"start", e.segment.start_frame},
       {"end", e.segment.end_frame},
       {"caption", e.caption},
       {"source", caption_source_name(e.caption_source)},
       {"prefix_len", e.prefix_len},
       {"created_at", e.created_at},
       {"start_time", e.segment.start_time},
       {"end_time", e.segment.end_time},
       {"confirmed_at", e.segment.confirmed_at_frame}};
  if (e.retry) j["retry"] = true;
}

void from_json(const nlohmann::json& j, MemoryEntry& e) {
  e = MemoryEntry{};
  e.segment.start_frame = j.at("start").get<int64_t>();
  e.segment.end_frame = j.at("end").get<int64_t>();
  e.segment.confirmed_at_frame = j.value("confirmed_at", e.segment.end_frame);
  e.segment.start_time = j.value("start_time", 0.0);
  e.segment.end_time = j.value("end_time", e.segment.start_time);
  e.caption = j.at("caption").get<std::string>();
  e.caption_source = parse_caption_source(j.at("source").get<std::string>());
  e.prefix_len = j.value("prefix_len", size_t{0});
  e.created_at = j.value("created_at", 0.0);
  e.retry = j.value("retry", false);
}

} // namespace streamcart::memory
