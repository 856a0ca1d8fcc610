#include "ses/ses.hpp"

#include "common/error.hpp"
#include "common/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamcart::ses {

namespace {

void require_range(double v, double lo, double hi, const char* field) {
  if (!(v >= lo && v <= hi)) {
    fail(ErrorCode::kValidation, std::string(field) + " out of range [" + std::to_string(lo) +
                                     ", " + std::to_string(hi) + "]: " + std::to_string(v));
  }
}

// The first frame of a signal has no predecessor.
double fused_value(const FrameFeature& f, bool first, double gamma) {
  return first ? fuse_similarity(1.0, 0.0, gamma)
               : fuse_similarity(f.vit_similarity, f.flow_magnitude, gamma);
}

} // namespace

void SesConfig::validate() const {
  require_range(gamma, 0.0, 1.0, "gamma");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail(ErrorCode::kValidation, "alpha must be >= 0");
  if (window_size < 2) fail(ErrorCode::kValidation, "window_size must be >= 2");
  if (min_segment_len < 1) fail(ErrorCode::kValidation, "min_segment_len must be >= 1");
  if (min_segment_len >= window_size)
    fail(ErrorCode::kValidation, "min_segment_len must be < window_size");
  if (warmup() < 1) fail(ErrorCode::kValidation, "warmup_frames must be >= 1");
}

double WindowStats::stddev() const { return std::sqrt(variance); }

double fuse_similarity(double c_vit, double m, double gamma) {
  require_range(c_vit, -1.0, 1.0, "vit_similarity");
  require_range(m, 0.0, 1.0, "flow_magnitude");
  require_range(gamma, 0.0, 1.0, "gamma");
  return gamma * c_vit + (1.0 - gamma) * m;
}

DepthSample compute_depth(std::span<const double> window, size_t i) {
  if (window.empty()) fail(ErrorCode::kInvalidArgument, "compute_depth: empty window");
  if (i >= window.size()) fail(ErrorCode::kInvalidArgument, "compute_depth: index outside window");

  const size_t n = window.size();
  auto local_max = [&](size_t j) {
    if (j > 0 && window[j] < window[j - 1]) return false;
    if (j + 1 < n && window[j] < window[j + 1]) return false;
    return true;
  };

  double left = window.front();
  for (size_t j = i; j-- > 0;) {
    if (local_max(j)) {
      left = window[j];
      break;
    }
  }
  double right = window.back();
  for (size_t j = i + 1; j < n; ++j) {
    if (local_max(j)) {
      right = window[j];
      break;
    }
  }

  DepthSample s;
  s.c_hat = window[i];
  s.left_peak = left;
  s.right_peak = right;
  s.depth = (left + right - 2.0 * window[i]) / 2.0;
  return s;
}

WindowStats update_window_stats(std::span<const double> depths) {
  WindowStats st;
  st.count = depths.size();
  if (depths.empty()) return st;
  double sum = 0.0;
  for (double d : depths) sum += d;
  st.mean = sum / static_cast<double>(depths.size());
  if (depths.size() == 1) return st;
  double ss = 0.0;
  for (double d : depths) ss += (d - st.mean) * (d - st.mean);
  st.variance = ss / static_cast<double>(depths.size());
  return st;
}

bool is_boundary(double d, const WindowStats& stats, double alpha) {
  // Only a valley can be a boundary. On a constant signal rounding can leave
  // the mean a hair below zero, which a zero depth would otherwise beat.
  return d > 0.0 && d > stats.mean + alpha * stats.stddev();
}

void validate_feature(const FrameFeature& f) {
  if (!(f.timestamp >= 0.0) || !std::isfinite(f.timestamp))
    fail(ErrorCode::kValidation, "timestamp must be a non-negative number");
  require_range(f.vit_similarity, -1.0, 1.0, "vit_similarity");
  require_range(f.flow_magnitude, 0.0, 1.0, "flow_magnitude");
}

// ---------------------------------------------------------------------------

SesStream::SesStream(SesConfig config) : config_(config) { config_.validate(); }

const SesStream::Retained& SesStream::at(int64_t index) const {
  return frames_.at(static_cast<size_t>(index - base_));
}

std::optional<EventSegment> SesStream::push(const FrameFeature& f) {
  instrument::note_segmentation();
  validate_feature(f);
  if (last_frame_id_ && f.frame_id <= *last_frame_id_) {
    fail(ErrorCode::kValidation, "frame_id must be strictly increasing (got " +
                                     std::to_string(f.frame_id) + " after " +
                                     std::to_string(*last_frame_id_) + ")");
  }
  if (last_timestamp_ && f.timestamp < *last_timestamp_)
    fail(ErrorCode::kValidation, "timestamp must be non-decreasing");
  last_frame_id_ = f.frame_id;
  last_timestamp_ = f.timestamp;
  ++total_frames_;

  frames_.push_back({f.frame_id, f.timestamp, fused_value(f, pushed_ == 0, config_.gamma)});
  if (pushed_ == 0) segment_first_ = frames_.back();
  ++pushed_;

  std::optional<EventSegment> out;
  const int64_t ready = pushed_ - 1 - config_.peak_reach();
  if (ready >= 0) {
    out = decide(ready, pushed_ - 1, pushed_);
    trim();
  }
  return out;
}

std::vector<EventSegment> SesStream::flush() {
  std::vector<EventSegment> out;
  if (pushed_ == 0) return out;
  while (next_decision_ < pushed_) {
    if (auto seg = decide(next_decision_, pushed_ - 1, pushed_)) out.push_back(*seg);
  }
  const auto& first = segment_first_;
  const auto& last = at(pushed_ - 1);
  out.push_back({first.frame_id, last.frame_id, last.frame_id, first.timestamp, last.timestamp});

  frames_.clear();
  depths_.clear();
  base_ = pushed_ = next_decision_ = segment_start_ = 0;
  return out;
}

std::optional<EventSegment> SesStream::decide(int64_t i, int64_t last_index, int64_t observed) {
  const int64_t reach = config_.peak_reach();
  const int64_t lo = std::max<int64_t>(0, i - reach);
  const int64_t hi = std::min(last_index, i + reach);

  std::vector<double> window;
  window.reserve(static_cast<size_t>(hi - lo + 1));
  for (int64_t k = lo; k <= hi; ++k) window.push_back(at(k).c_hat);

  DepthSample ds = compute_depth(window, static_cast<size_t>(i - lo));
  ds.frame_id = at(i).frame_id;
  last_depth_ = ds;

  depths_.push_back(ds.depth);
  while (depths_.size() > static_cast<size_t>(config_.window_size)) depths_.pop_front();
  const std::vector<double> trailing(depths_.begin(), depths_.end());
  const WindowStats stats = update_window_stats(trailing);
  ++next_decision_;

  const bool accept = is_boundary(ds.depth, stats, config_.alpha) &&
                      i - segment_start_ >= config_.min_segment_len &&
                      observed >= config_.warmup();
  if (!accept) return std::nullopt;

  const auto& prev = at(i - 1);
  EventSegment seg{segment_first_.frame_id, prev.frame_id, at(observed - 1).frame_id,
                   segment_first_.timestamp, prev.timestamp};
  segment_start_ = i;
  segment_first_ = at(i);
  return seg;
}

void SesStream::trim() {
  // Peak window of the next decision, plus the frame before it (segment end).
  const int64_t keep_from = std::max<int64_t>(0, next_decision_ - config_.peak_reach() - 1);
  while (base_ < keep_from && !frames_.empty()) {
    frames_.pop_front();
    ++base_;
  }
}

// ---------------------------------------------------------------------------

OfflineSegmentation segment_offline_detailed(std::span<const FrameFeature> signal,
                                             const SesConfig& config) {
  instrument::note_segmentation();
  config.validate();
  OfflineSegmentation out;
  const auto n = static_cast<int64_t>(signal.size());
  if (n == 0) return out;

  std::vector<double> fused(signal.size());
  for (int64_t k = 0; k < n; ++k) {
    const auto& f = signal[static_cast<size_t>(k)];
    validate_feature(f);
    if (k > 0 && f.frame_id <= signal[static_cast<size_t>(k - 1)].frame_id)
      fail(ErrorCode::kValidation, "frame_id must be strictly increasing");
    if (k > 0 && f.timestamp < signal[static_cast<size_t>(k - 1)].timestamp)
      fail(ErrorCode::kValidation, "timestamp must be non-decreasing");
    fused[static_cast<size_t>(k)] = fused_value(f, k == 0, config.gamma);
  }

  const int64_t reach = config.peak_reach();
  const int64_t w = config.window_size;
  std::vector<double> depth(signal.size());
  for (int64_t i = 0; i < n; ++i) {
    const int64_t lo = std::max<int64_t>(0, i - reach);
    const int64_t hi = std::min(n - 1, i + reach);
    std::span<const double> window(fused.data() + lo, static_cast<size_t>(hi - lo + 1));
    DepthSample ds = compute_depth(window, static_cast<size_t>(i - lo));
    ds.frame_id = signal[static_cast<size_t>(i)].frame_id;
    depth[static_cast<size_t>(i)] = ds.depth;
    out.depths.push_back(ds);
  }

  int64_t start = 0;
  for (int64_t i = 0; i < n; ++i) {
    const int64_t from = std::max<int64_t>(0, i - w + 1);
    std::span<const double> trailing(depth.data() + from, static_cast<size_t>(i - from + 1));
    const WindowStats stats = update_window_stats(trailing);
    const bool exceeds = is_boundary(depth[static_cast<size_t>(i)], stats, config.alpha);
    out.exceeds_threshold.push_back(exceeds);

    const int64_t decided_at = std::min(i + reach, n - 1);
    if (exceeds && i - start >= config.min_segment_len && decided_at + 1 >= config.warmup()) {
      const auto& a = signal[static_cast<size_t>(start)];
      const auto& b = signal[static_cast<size_t>(i - 1)];
      out.segments.push_back({a.frame_id, b.frame_id, signal[static_cast<size_t>(decided_at)].frame_id,
                              a.timestamp, b.timestamp});
      start = i;
    }
  }
  const auto& a = signal[static_cast<size_t>(start)];
  const auto& b = signal.back();
  out.segments.push_back({a.frame_id, b.frame_id, b.frame_id, a.timestamp, b.timestamp});
  return out;
}

std::vector<EventSegment> segment_offline(std::span<const FrameFeature> signal,
                                          const SesConfig& config) {
  return segment_offline_detailed(signal, config).segments;
}

} // namespace streamcart::ses
