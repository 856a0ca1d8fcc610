#pragma once

#include "clickqa/overlay.hpp"
#include "clickqa/raster.hpp"
#include "kea/kea.hpp"
#include "memory/store.hpp"
#include "ses/ses.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::service {

struct SessionStats {
  uint64_t frames_received = 0;
  uint64_t frames_processed = 0;
  uint64_t segments = 0;
  uint64_t prefix_reused = 0;
  uint64_t caption_failures = 0;
  uint64_t rejected_frames = 0;
  size_t queued = 0;
};

// One live stream. Frames are queued by request handlers and consumed by a
// dedicated worker that owns the SES state and runs captioning, so request
// threads never segment or caption. Config is fixed at construction.
class Session {
public:
  Session(std::string id, std::string product_id, ses::SesConfig ses, kea::KeaConfig kea,
          std::shared_ptr<backend::ModelBackend> backend);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  const std::string& product_id() const { return product_id_; }
  const ses::SesConfig& ses_config() const { return ses_config_; }

  // Cheap checks only (ranges, ordering against earlier enqueued frames);
  // segmentation happens on the worker.
  void enqueue(const std::vector<ses::FrameFeature>& frames, bool flush = false);
  // Blocks until everything queued so far has been processed.
  void drain();

  memory::MemoryStore& memory() { return *memory_; }
  std::shared_ptr<memory::MemoryStore> memory_ptr() { return memory_; }

  void put_overlay(const clickqa::FrameOverlay& overlay);
  std::optional<clickqa::FrameOverlay> overlay(int64_t frame_id) const;
  std::optional<clickqa::FrameOverlay> latest_overlay() const;
  // Rendered stand-in frame for an overlay, cached per frame_id.
  std::shared_ptr<const clickqa::Image> frame_image(int64_t frame_id) const;

  SessionStats stats() const;

private:
  struct Item {
    std::vector<ses::FrameFeature> frames;
    bool flush = false;
  };

  void run();
  void handle_segment(const ses::EventSegment& segment);

  std::string id_;
  std::string product_id_;
  ses::SesConfig ses_config_;
  kea::KeaConfig kea_config_;
  std::shared_ptr<backend::ModelBackend> backend_;
  std::shared_ptr<memory::MemoryStore> memory_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<Item> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::optional<int64_t> last_enqueued_id_;
  std::optional<double> last_enqueued_ts_;
  SessionStats stats_;

  mutable std::mutex overlay_mu_;
  std::map<int64_t, clickqa::FrameOverlay> overlays_;
  mutable std::map<int64_t, std::shared_ptr<const clickqa::Image>> images_;
  std::optional<int64_t> latest_overlay_;

  ses::SesStream stream_;  // worker thread only
  std::thread worker_;
};

} // namespace streamcart::service
