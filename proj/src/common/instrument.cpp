#include "common/instrument.hpp"

#include <atomic>

namespace streamcart::instrument {

namespace {

thread_local bool t_request_path = false;

std::atomic<uint64_t> g_seg{0};
std::atomic<uint64_t> g_cap{0};
std::atomic<uint64_t> g_seg_req{0};
std::atomic<uint64_t> g_cap_req{0};

} // namespace

RequestPathScope::RequestPathScope() : previous_(t_request_path) { t_request_path = true; }
RequestPathScope::~RequestPathScope() { t_request_path = previous_; }

bool on_request_path() { return t_request_path; }

void note_segmentation() {
  g_seg.fetch_add(1, std::memory_order_relaxed);
  if (t_request_path) g_seg_req.fetch_add(1, std::memory_order_relaxed);
}

void note_caption() {
  g_cap.fetch_add(1, std::memory_order_relaxed);
  if (t_request_path) g_cap_req.fetch_add(1, std::memory_order_relaxed);
}

Counters counters() {
  return {g_seg.load(), g_cap.load(), g_seg_req.load(), g_cap_req.load()};
}

void reset_counters() {
  g_seg = 0;
  g_cap = 0;
  g_seg_req = 0;
  g_cap_req = 0;
}

} // namespace streamcart::instrument
