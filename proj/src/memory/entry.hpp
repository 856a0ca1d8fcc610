#pragma once

#include "kea/kea.hpp"
#include "ses/ses.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace streamcart::memory {

enum class CaptionSource { kFresh, kPrefixReused };

const char* caption_source_name(CaptionSource s);
CaptionSource parse_caption_source(std::string_view s);

struct MemoryEntry {
  ses::EventSegment segment;
  std::string caption;
  CaptionSource caption_source = CaptionSource::kFresh;
  size_t prefix_len = 0;   // tokens reused from the previous caption
  double created_at = 0.0; // stream time, seconds
  bool retry = false;      // captioning failed; caption is empty
  std::vector<kea::TokenScore> trace;  // this caption's token confidences, when known
};

// Dump line fields: start, end, caption, source, prefix_len, created_at
// (plus start_time/end_time/retry). Traces are not persisted.
void to_json(nlohmann::json& j, const MemoryEntry& e);
void from_json(const nlohmann::json& j, MemoryEntry& e);

} // namespace streamcart::memory
