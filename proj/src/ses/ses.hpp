#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace streamcart::ses {

struct FrameFeature {
  int64_t frame_id = 0;
  double timestamp = 0.0;
  double vit_similarity = 1.0;  // cosine similarity to the previous frame, [-1, 1]
  double flow_magnitude = 0.0;  // mean optical flow vs previous frame, pre-normalized to [0, 1]
};

struct SesConfig {
  double gamma = 0.5;
  double alpha = 1.0;
  int window_size = 64;
  int min_segment_len = 8;
  std::optional<int> warmup_frames;  // unset means window_size

  void validate() const;
  int warmup() const { return warmup_frames.value_or(window_size); }
  // Frames on each side of i searched for peaks; also the decision lag.
  int peak_reach() const { return window_size / 2; }
};

struct DepthSample {
  int64_t frame_id = 0;
  double c_hat = 0.0;
  double depth = 0.0;
  double left_peak = 0.0;
  double right_peak = 0.0;
};

struct WindowStats {
  double mean = 0.0;
  double variance = 0.0;
  size_t count = 0;

  double stddev() const;
};

struct EventSegment {
  int64_t start_frame = 0;
  int64_t end_frame = 0;
  int64_t confirmed_at_frame = 0;
  double start_time = 0.0;
  double end_time = 0.0;

  int64_t frame_count() const { return end_frame - start_frame + 1; }
  bool operator==(const EventSegment&) const = default;
};

// Convex fusion of ViT similarity and flow magnitude.
double fuse_similarity(double c_vit, double m, double gamma);

// Depth of window[i] against the nearest local maximum on each side. A local
// maximum is >= each neighbour that exists inside the window; with no local
// maximum on a side, that side's window endpoint is used. frame_id is left 0.
DepthSample compute_depth(std::span<const double> window, size_t i);

// Exact mean and population variance of the given depths.
WindowStats update_window_stats(std::span<const double> depths);

// Strict threshold test d > mean + alpha * stddev, for positive depths only.
bool is_boundary(double d, const WindowStats& stats, double alpha);

// Validates a single feature record (field ranges only).
void validate_feature(const FrameFeature& f);

// Streaming segmenter. Frame i (0-based position since the last flush) is
// decided once frame i + R arrives, R = peak_reach():
//   * its depth uses fused values in [i - R, i + R],
//   * the threshold uses the depths of frames [i - W + 1, i],
//   * it becomes a boundary when the threshold is exceeded, the segment it
//     closes has at least min_segment_len frames, and at least warmup()
//     frames had been pushed when the decision was made.
// flush() decides the remaining frames against the truncated signal, so
// pushing a finite signal and flushing reproduces segment_offline().
class SesStream {
public:
  explicit SesStream(SesConfig config);

  // Returns the segment closed by a boundary confirmed by this frame, if any.
  std::optional<EventSegment> push(const FrameFeature& f);

  // Decides pending frames and closes the open segment at the last frame.
  // The next push starts a fresh signal.
  std::vector<EventSegment> flush();

  const SesConfig& config() const { return config_; }
  size_t frames_in_signal() const { return static_cast<size_t>(pushed_); }
  const std::optional<DepthSample>& last_depth() const { return last_depth_; }
  uint64_t total_frames() const { return total_frames_; }

private:
  struct Retained {
    int64_t frame_id;
    double timestamp;
    double c_hat;
  };

  std::optional<EventSegment> decide(int64_t i, int64_t last_index, int64_t observed);
  const Retained& at(int64_t index) const;
  void trim();

  SesConfig config_;
  std::deque<Retained> frames_;  // signal positions [base_, pushed_)
  int64_t base_ = 0;
  int64_t pushed_ = 0;
  int64_t next_decision_ = 0;
  std::deque<double> depths_;  // trailing depths ending at next_decision_ - 1
  int64_t segment_start_ = 0;
  Retained segment_first_{};
  std::optional<int64_t> last_frame_id_;
  std::optional<double> last_timestamp_;
  std::optional<DepthSample> last_depth_;
  uint64_t total_frames_ = 0;
};

struct OfflineSegmentation {
  std::vector<DepthSample> depths;
  std::vector<bool> exceeds_threshold;  // raw threshold test, before gating
  std::vector<EventSegment> segments;
};

// Batch segmentation of a complete signal with the same window semantics as
// SesStream; the equivalence oracle for the streaming path.
OfflineSegmentation segment_offline_detailed(std::span<const FrameFeature> signal,
                                             const SesConfig& config);

std::vector<EventSegment> segment_offline(std::span<const FrameFeature> signal,
                                          const SesConfig& config);

} // namespace streamcart::ses
