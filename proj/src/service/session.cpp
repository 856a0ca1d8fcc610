#include "service/session.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"
#include "memory/caption.hpp"

#include <spdlog/spdlog.h>

namespace streamcart::service {

Session::Session(std::string id, std::string product_id, ses::SesConfig ses, kea::KeaConfig kea,
                 std::shared_ptr<backend::ModelBackend> backend)
    : id_(std::move(id)),
      product_id_(std::move(product_id)),
      ses_config_(ses),
      kea_config_(kea),
      backend_(std::move(backend)),
      memory_(std::make_shared<memory::MemoryStore>()),
      stream_(ses) {
  worker_ = std::thread([this] { run(); });
}

Session::~Session() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void Session::enqueue(const std::vector<ses::FrameFeature>& frames, bool flush) {
  std::unique_lock lock(mu_);
  auto last_id = last_enqueued_id_;
  auto last_ts = last_enqueued_ts_;
  for (const auto& f : frames) {
    try {
      ses::validate_feature(f);
    } catch (const Error&) {
      ++stats_.rejected_frames;
      throw;
    }
    if ((last_id && f.frame_id <= *last_id) || (last_ts && f.timestamp < *last_ts)) {
      ++stats_.rejected_frames;
      fail(ErrorCode::kValidation, "frame " + std::to_string(f.frame_id) +
                                       " is out of order for session " + id_);
    }
    last_id = f.frame_id;
    last_ts = f.timestamp;
  }
  last_enqueued_id_ = last_id;
  last_enqueued_ts_ = last_ts;
  stats_.frames_received += frames.size();
  queue_.push_back({frames, flush});
  lock.unlock();
  cv_.notify_one();
}

void Session::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void Session::run() {
  while (true) {
    Item item;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      item = std::move(queue_.front());
      queue_.pop_front();
      busy_ = true;
    }
    for (const auto& f : item.frames) {
      try {
        if (auto seg = stream_.push(f)) handle_segment(*seg);
      } catch (const Error& e) {
        spdlog::error("session {}: frame {} dropped: {}", id_, f.frame_id, e.what());
      }
      std::lock_guard lock(mu_);
      ++stats_.frames_processed;
    }
    if (item.flush) {
      for (const auto& seg : stream_.flush()) handle_segment(seg);
    }
    {
      std::lock_guard lock(mu_);
      busy_ = false;
    }
    idle_cv_.notify_all();
  }
}

void Session::handle_segment(const ses::EventSegment& segment) {
  auto entry = memory::caption_pipeline(segment, memory_->last(), *backend_, kea_config_, segment.end_time);
  {
    std::lock_guard lock(mu_);
    ++stats_.segments;
    if (entry.caption_source == memory::CaptionSource::kPrefixReused) ++stats_.prefix_reused;
    if (entry.retry) ++stats_.caption_failures;
  }
  try {
    memory_->append(std::move(entry));
  } catch (const Error& e) {
    spdlog::error("session {}: memory append failed: {}", id_, e.what());
  }
}

void Session::put_overlay(const clickqa::FrameOverlay& overlay) {
  overlay.validate();
  std::lock_guard lock(overlay_mu_);
  overlays_[overlay.frame_id] = overlay;
  images_.erase(overlay.frame_id);
  if (!latest_overlay_ || overlay.frame_id >= *latest_overlay_) latest_overlay_ = overlay.frame_id;
}

std::optional<clickqa::FrameOverlay> Session::overlay(int64_t frame_id) const {
  std::lock_guard lock(overlay_mu_);
  const auto it = overlays_.find(frame_id);
  if (it == overlays_.end()) return std::nullopt;
  return it->second;
}

std::optional<clickqa::FrameOverlay> Session::latest_overlay() const {
  std::lock_guard lock(overlay_mu_);
  if (!latest_overlay_) return std::nullopt;
  return overlays_.at(*latest_overlay_);
}

std::shared_ptr<const clickqa::Image> Session::frame_image(int64_t frame_id) const {
  std::lock_guard lock(overlay_mu_);
  auto& img = images_[frame_id];
  if (!img) {
    const auto it = overlays_.find(frame_id);
    if (it == overlays_.end()) {
      images_.erase(frame_id);
      fail(ErrorCode::kNotFound, "no overlay for frame " + std::to_string(frame_id));
    }
    img = std::make_shared<const clickqa::Image>(clickqa::render_overlay(it->second));
  }
  return img;
}

SessionStats Session::stats() const {
  std::lock_guard lock(mu_);
  auto s = stats_;
  for (const auto& item : queue_) s.queued += item.frames.size();
  return s;
}

} // namespace streamcart::service
