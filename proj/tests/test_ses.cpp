#include "common/error.hpp"
#include "common/random.hpp"
#include "oracles.hpp"
#include "ses/feature_io.hpp"
#include "ses/ses.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace streamcart;
using namespace streamcart::ses;

namespace {

std::vector<double> canonical_dip() {
  std::vector<double> c(100, 0.9);
  c[50] = 0.1;
  return c;
}

std::vector<int64_t> streamed_boundaries(const std::vector<FrameFeature>& frames, const SesConfig& cfg) {
  SesStream s(cfg);
  std::vector<EventSegment> segs;
  for (const auto& f : frames) {
    if (auto seg = s.push(f)) segs.push_back(*seg);
  }
  for (const auto& seg : s.flush()) segs.push_back(seg);
  return testutil::starts_after_first(segs);
}

oracle::SesParams params_of(const SesConfig& c) {
  return {c.gamma, c.alpha, c.window_size, c.min_segment_len, c.warmup()};
}

std::vector<FrameFeature> random_stream(uint64_t seed, size_t n) {
  Rng rng(seed);
  std::vector<FrameFeature> out;
  for (size_t i = 0; i < n; ++i) {
    FrameFeature f{static_cast<int64_t>(i), i / 30.0, rng.uniform(0.6, 1.0), rng.uniform(0.0, 0.3)};
    if (rng.below(40) == 0) f.vit_similarity = rng.uniform(-0.2, 0.3);
    out.push_back(f);
  }
  return out;
}

} // namespace

TEST_CASE("fuse_similarity") {
  CHECK(fuse_similarity(0.8, 0.4, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(fuse_similarity(1.0, 1.0, 0.5) == 1.0);
  CHECK(fuse_similarity(0.3, 0.9, 1.0) == 0.3);
  CHECK_THROWS_AS(fuse_similarity(1.5, 0.2, 0.5), Error);
  CHECK_THROWS_AS(fuse_similarity(0.5, -0.1, 0.5), Error);
  CHECK_THROWS_AS(fuse_similarity(0.5, 0.1, 1.2), Error);
  try {
    fuse_similarity(0.5, 1.5, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("flow_magnitude") != std::string::npos);
  }
}

TEST_CASE("compute_depth examples") {
  const std::vector<double> a{0.9, 0.9, 0.2, 0.9, 0.9};
  CHECK(compute_depth(a, 2).depth == doctest::Approx(0.7));
  const std::vector<double> flat{0.5, 0.5, 0.5};
  CHECK(compute_depth(flat, 1).depth == 0.0);
  const std::vector<double> b{0.2, 0.8, 0.5, 0.9, 0.1};
  const auto d = compute_depth(b, 2);
  CHECK(d.left_peak == 0.8);
  CHECK(d.right_peak == 0.9);
  CHECK(d.depth == doctest::Approx(0.35));
  const auto o = oracle::depth(b, 2);
  CHECK(d.depth == o.depth);
  CHECK_THROWS_AS(compute_depth(std::vector<double>{}, 0), Error);
}

TEST_CASE("compute_depth matches the peak-search oracle") {
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    const size_t n = 1 + rng.below(40);
    std::vector<double> w(n);
    for (auto& x : w) x = rng.below(4) == 0 ? 0.5 : rng.uniform(-1, 1);
    const size_t i = rng.below(n);
    const auto got = compute_depth(w, i);
    const auto want = oracle::depth(w, i);
    REQUIRE(got.left_peak == want.left);
    REQUIRE(got.right_peak == want.right);
    REQUIRE(got.depth == want.depth);
    REQUIRE(got.depth == (got.left_peak + got.right_peak - 2.0 * got.c_hat) / 2.0);
  }
}

TEST_CASE("window stats") {
  auto s = update_window_stats(std::vector<double>{0, 0, 0, 0});
  CHECK(s.mean == 0);
  CHECK(s.variance == 0);
  s = update_window_stats(std::vector<double>{0.7});
  CHECK(s.mean == 0.7);
  CHECK(s.variance == 0);
  CHECK(s.count == 1);
  s = update_window_stats(std::vector<double>{0.1, 0.3});
  const auto [m, v] = oracle::mean_var({0.1, 0.3});
  CHECK(s.mean == doctest::Approx(0.2));
  CHECK(s.variance == doctest::Approx(0.01));
  CHECK(s.mean == doctest::Approx(m));
  CHECK(s.variance == doctest::Approx(v));
  s = update_window_stats(std::vector<double>{});
  CHECK(s.count == 0);
  CHECK(s.mean == 0);
  CHECK(s.variance == 0);
}

TEST_CASE("is_boundary") {
  CHECK(is_boundary(0.7, {0.05, 0.01, 10}, 1.0));
  CHECK_FALSE(is_boundary(0.0, {0.0, 0.0, 10}, 1.0));
  CHECK_FALSE(is_boundary(0.2, {0.2, 0.0, 10}, 1.0));
  CHECK_FALSE(is_boundary(0.0, {-1e-17, 0.0, 10}, 0.0));
  CHECK_FALSE(is_boundary(-0.1, {-0.5, 0.01, 10}, 1.0));
}

TEST_CASE("config validation") {
  SesConfig c;
  CHECK_NOTHROW(c.validate());
  c.min_segment_len = 64;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.alpha = -0.1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.window_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("single planted dip gives exactly one boundary") {
  const auto frames = testutil::from_fused(canonical_dip());
  SesConfig cfg;
  const auto segs = segment_offline(frames, cfg);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].start_frame == 0);
  CHECK(segs[0].end_frame == 49);
  CHECK(segs[1].start_frame == 50);
  CHECK(segs[1].end_frame == 99);
  CHECK(streamed_boundaries(frames, cfg) == std::vector<int64_t>{50});
  CHECK(oracle::boundaries({}, params_of(cfg)).empty());
  std::vector<oracle::Frame> of;
  for (double c : canonical_dip()) of.push_back({c, c});
  CHECK(oracle::boundaries(of, params_of(cfg)) == std::vector<int64_t>{50});
}

TEST_CASE("streaming emits the dip once its right side is seen") {
  const auto frames = testutil::from_fused(canonical_dip());
  SesStream s(SesConfig{});
  std::optional<EventSegment> got;
  int64_t at = -1;
  for (const auto& f : frames) {
    if (auto seg = s.push(f)) {
      CHECK_FALSE(got.has_value());
      got = seg;
      at = f.frame_id;
    }
  }
  REQUIRE(got);
  CHECK(got->end_frame == 49);
  CHECK(at == 50 + 32);
  CHECK(got->confirmed_at_frame == at);
  CHECK(at - 50 <= SesConfig{}.window_size);
  const auto rest = s.flush();
  REQUIRE(rest.size() == 1);
  CHECK(rest[0].start_frame == 50);
  CHECK(rest[0].end_frame == 99);
}

TEST_CASE("constant signals never produce a boundary") {
  for (double alpha : {0.0, 0.5, 1.0, 3.0}) {
    SesConfig cfg;
    cfg.alpha = alpha;
    for (double c : {0.0, 0.5, 0.9, 1.0}) {
      const auto frames = testutil::from_fused(std::vector<double>(100, c));
      SesStream s(cfg);
      for (const auto& f : frames) CHECK_FALSE(s.push(f).has_value());
      const auto segs = s.flush();
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].start_frame == 0);
      CHECK(segs[0].end_frame == 99);
    }
  }
}

TEST_CASE("a second nearby dip is suppressed by min_segment_len") {
  std::vector<double> c(120, 0.9);
  c[60] = 0.1;
  c[63] = 0.1;
  const auto frames = testutil::from_fused(c);
  SesConfig cfg;
  cfg.min_segment_len = 8;
  const auto got = streamed_boundaries(frames, cfg);
  CHECK(got.size() == 1);
  CHECK(got == testutil::starts_after_first(segment_offline(frames, cfg)));
  std::vector<oracle::Frame> of;
  for (double x : c) of.push_back({x, x});
  CHECK(got == oracle::boundaries(of, params_of(cfg)));
}

TEST_CASE("flush") {
  SesStream s(SesConfig{});
  CHECK(s.flush().empty());
  for (int i = 0; i < 5; ++i) s.push({i, i / 30.0, 0.9, 0.1});
  auto segs = s.flush();
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start_frame == 0);
  CHECK(segs[0].end_frame == 4);

  // Flushing right after a confirmed boundary closes [k, last].
  const auto frames = testutil::from_fused(canonical_dip());
  SesStream t(SesConfig{});
  size_t k = 0;
  for (; k < frames.size(); ++k) {
    if (t.push(frames[k])) break;
  }
  REQUIRE(k < frames.size());
  segs = t.flush();
  REQUIRE_FALSE(segs.empty());
  CHECK(segs.front().start_frame == 50);
  CHECK(segs.back().end_frame == frames[k].frame_id);
  const std::vector<FrameFeature> prefix(frames.begin(), frames.begin() + static_cast<long>(k) + 1);
  const auto offline = segment_offline(prefix, SesConfig{});
  CHECK(offline.back().end_frame == segs.back().end_frame);

  // After a flush the next push opens a new signal.
  CHECK_FALSE(t.push({1000, 100.0, 0.9, 0.9}).has_value());
  segs = t.flush();
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].start_frame == 1000);
}

TEST_CASE("push rejects out-of-order frames") {
  SesStream s(SesConfig{});
  s.push({5, 0.0, 0.9, 0.1});
  CHECK_THROWS_AS(s.push({5, 0.1, 0.9, 0.1}), Error);
  CHECK_THROWS_AS(s.push({4, 0.1, 0.9, 0.1}), Error);
  CHECK_THROWS_AS(s.push({6, -1.0, 0.9, 0.1}), Error);
  CHECK_NOTHROW(s.push({6, 0.1, 0.9, 0.1}));
}

TEST_CASE("streaming equals offline and the oracle on random signals") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    SesConfig cfg;
    cfg.window_size = 8 + static_cast<int>(rng.below(40));
    cfg.min_segment_len = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cfg.window_size - 1)));
    cfg.alpha = rng.uniform(0.0, 2.5);
    cfg.gamma = rng.uniform(0.0, 1.0);
    if (rng.below(2)) cfg.warmup_frames = 1 + static_cast<int>(rng.below(100));
    const auto frames = random_stream(seed, 200 + rng.below(400));
    const auto streamed = streamed_boundaries(frames, cfg);
    const auto offline = testutil::starts_after_first(segment_offline(frames, cfg));
    REQUIRE(streamed == offline);
    std::vector<oracle::Frame> of;
    for (const auto& f : frames) of.push_back({f.vit_similarity, f.flow_magnitude});
    REQUIRE(offline == oracle::boundaries(of, params_of(cfg)));
  }
}

TEST_CASE("segments partition the frame range") {
  for (uint64_t seed = 100; seed < 130; ++seed) {
    const auto frames = random_stream(seed, 700);
    SesStream s(SesConfig{});
    std::vector<EventSegment> segs;
    for (const auto& f : frames) {
      if (auto seg = s.push(f)) segs.push_back(*seg);
    }
    for (const auto& seg : s.flush()) segs.push_back(seg);
    REQUIRE_FALSE(segs.empty());
    CHECK(segs.front().start_frame == 0);
    CHECK(segs.back().end_frame == 699);
    for (size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start_frame <= segs[i].end_frame);
      if (i + 1 < segs.size()) {
        CHECK(segs[i + 1].start_frame == segs[i].end_frame + 1);
        CHECK(segs[i].frame_count() >= SesConfig{}.min_segment_len);
        CHECK(segs[i].confirmed_at_frame - segs[i + 1].start_frame <= SesConfig{}.window_size);
      }
    }
  }
}

TEST_CASE("raising alpha never adds a raw threshold crossing") {
  for (uint64_t seed = 200; seed < 230; ++seed) {
    const auto frames = random_stream(seed, 500);
    SesConfig lo, hi;
    lo.alpha = 0.5;
    hi.alpha = 1.5;
    const auto a = segment_offline_detailed(frames, lo).exceeds_threshold;
    const auto b = segment_offline_detailed(frames, hi).exceeds_threshold;
    for (size_t i = 0; i < a.size(); ++i) {
      if (b[i]) CHECK(a[i]);
    }
    // With no length gate the emitted boundaries are monotone as well.
    lo.min_segment_len = hi.min_segment_len = 1;
    lo.warmup_frames = hi.warmup_frames = 1;
    const auto sa = testutil::starts_after_first(segment_offline(frames, lo));
    const auto sb = testutil::starts_after_first(segment_offline(frames, hi));
    for (auto x : sb) CHECK(std::find(sa.begin(), sa.end(), x) != sa.end());
  }
}

TEST_CASE("depth samples are internally consistent and deterministic") {
  const auto frames = random_stream(3, 400);
  const auto a = segment_offline_detailed(frames, SesConfig{});
  const auto b = segment_offline_detailed(frames, SesConfig{});
  for (const auto& d : a.depths) CHECK(d.depth == (d.left_peak + d.right_peak - 2.0 * d.c_hat) / 2.0);
  CHECK(a.segments == b.segments);
}

TEST_CASE("feature file round trip and errors") {
  const auto frames = random_stream(9, 50);
  std::stringstream ss;
  write_feature_file(ss, frames, "unit-max");
  const auto back = read_feature_file(ss);
  REQUIRE(back.frames.size() == frames.size());
  CHECK(back.header.at("flow_normalization") == "unit-max");
  for (size_t i = 0; i < frames.size(); ++i) {
    CHECK(back.frames[i].frame_id == frames[i].frame_id);
    CHECK(back.frames[i].vit_similarity == frames[i].vit_similarity);
    CHECK(back.frames[i].flow_magnitude == frames[i].flow_magnitude);
  }
  std::stringstream bad_version("#ses-features version=2\n");
  CHECK_THROWS_AS(read_feature_file(bad_version), Error);
  std::stringstream bad_row("#ses-features version=1\n0,0.0,0.5\n");
  try {
    read_feature_file(bad_row);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
  std::stringstream bad_range("#ses-features version=1\n0,0.0,0.5,1.5\n");
  CHECK_THROWS_AS(read_feature_file(bad_range), Error);
  CHECK_THROWS_AS(read_feature_file(std::string("/nonexistent/features.csv")), Error);
}

TEST_CASE("demo feature stream segments at its planted cuts") {
  const auto file = read_feature_file(testutil::source_path("data/demo/features.csv"));
  SesConfig cfg;
  cfg.alpha = 3.0;
  CHECK(testutil::starts_after_first(segment_offline(file.frames, cfg)) == std::vector<int64_t>{300, 600, 900});
}
