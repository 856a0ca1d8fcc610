#pragma once

#include <cstdint>

namespace streamcart::instrument {

// Marks the current thread as serving a client request for the lifetime of
// the scope. Segmentation and captioning record themselves; work that
// happens while a scope is active is counted as a request-path violation.
class RequestPathScope {
public:
  RequestPathScope();
  ~RequestPathScope();
  RequestPathScope(const RequestPathScope&) = delete;
  RequestPathScope& operator=(const RequestPathScope&) = delete;

private:
  bool previous_;
};

bool on_request_path();

void note_segmentation();
void note_caption();

struct Counters {
  uint64_t segmentation_total = 0;
  uint64_t caption_total = 0;
  uint64_t segmentation_on_request_path = 0;
  uint64_t caption_on_request_path = 0;
};

Counters counters();
void reset_counters();

} // namespace streamcart::instrument
