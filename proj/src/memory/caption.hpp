#pragma once

#include "kea/kea.hpp"
#include "memory/entry.hpp"

#include <optional>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::memory {

// Captions a closed segment. With a usable prior entry its token trace
// (recorded, or fetched from the backend) goes through KEA and the new
// caption continues from the selected prefix. Backend failures yield an
// entry with an empty caption and retry set.
MemoryEntry caption_pipeline(const ses::EventSegment& segment, const std::optional<MemoryEntry>& prior,
                             backend::ModelBackend& backend, const kea::KeaConfig& kea_config = {},
                             double created_at = 0.0);

} // namespace streamcart::memory
