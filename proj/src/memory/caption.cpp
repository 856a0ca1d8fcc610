#include "memory/caption.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"
#include "common/instrument.hpp"

#include <spdlog/spdlog.h>

namespace streamcart::memory {

MemoryEntry caption_pipeline(const ses::EventSegment& segment, const std::optional<MemoryEntry>& prior,
                             backend::ModelBackend& backend, const kea::KeaConfig& kea_config,
                             double created_at) {
  instrument::note_caption();
  MemoryEntry entry;
  entry.segment = segment;
  entry.created_at = created_at;
  try {
    backend::CaptionRequest req;
    req.segment = segment;
    if (prior && !prior->retry && !prior->caption.empty()) {
      auto trace = prior->trace.empty() ? backend.caption_trace(prior->caption) : prior->trace;
      if (trace.size() >= 2) {
        const auto cut = kea::find_truncation(trace, kea_config);
        std::vector<std::string> tokens;
        tokens.reserve(trace.size());
        for (const auto& t : trace) tokens.push_back(t.token_text);
        req.prefix_tokens = kea::build_prefix(tokens, cut);
        entry.caption_source = CaptionSource::kPrefixReused;
        entry.prefix_len = cut.prefix_len;
      }
    }
    auto reply = backend.caption(req);
    entry.caption = std::move(reply.text);
    entry.trace = std::move(reply.scores);
  } catch (const Error& e) {
    spdlog::warn("caption for segment [{}, {}] failed, marked for retry: {}", segment.start_frame,
                 segment.end_frame, e.what());
    entry.caption.clear();
    entry.trace.clear();
    entry.caption_source = CaptionSource::kFresh;
    entry.prefix_len = 0;
    entry.retry = true;
  }
  return entry;
}

} // namespace streamcart::memory
