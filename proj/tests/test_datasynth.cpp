#include "clickqa/dataset.hpp"
#include "clickqa/overlay.hpp"
#include "common/error.hpp"
#include "common/random.hpp"
#include "datasynth/datasynth.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

using namespace streamcart;
using namespace streamcart::datasynth;

namespace {

std::vector<QAItem> pool(size_t n) {
  std::vector<QAItem> out;
  const char* cats[] = {"electronics", "appliances", "clothing", "food", "others"};
  for (size_t i = 0; i < n; ++i)
    out.push_back({"qa" + std::to_string(i), "Question number " + std::to_string(i) + "?",
                   "Answer " + std::to_string(i) + ".", cats[i % 5]});
  return out;
}

bool pairwise_disjoint(const clickqa::FrameOverlay& ov) {
  for (size_t i = 0; i < ov.messages.size(); ++i)
    for (size_t j = i + 1; j < ov.messages.size(); ++j) {
      const auto& a = ov.messages[i].bbox;
      const auto& b = ov.messages[j].bbox;
      const bool apart = a.x_max <= b.x_min || b.x_max <= a.x_min || a.y_max <= b.y_min || b.y_max <= a.y_min;
      if (!apart) return false;
    }
  return true;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("plan_layout places disjoint boxes deterministically") {
  SynthConfig cfg;
  cfg.seed = 7;
  const std::vector<std::string> qs{"Is it waterproof?", "What colour?", "How much?", "Any discount today?"};
  Rng a(7), b(7);
  const auto ov = plan_layout(qs, cfg, a);
  CHECK(ov == plan_layout(qs, cfg, b));
  REQUIRE(ov.messages.size() == 4);
  CHECK(pairwise_disjoint(ov));
  for (const auto& m : ov.messages) {
    CHECK(m.bbox.x_min >= 0);
    CHECK(m.bbox.y_min >= 0);
    CHECK(m.bbox.x_max <= cfg.frame_width);
    CHECK(m.bbox.y_max <= cfg.frame_height);
  }
  Rng c(7);
  cfg.questions_per_image = 1;
  CHECK(plan_layout(std::vector<std::string>{"One?"}, cfg, c).messages.size() == 1);
}

TEST_CASE("plan_layout errors") {
  SynthConfig cfg;
  cfg.frame_width = 100;
  cfg.frame_height = 20;
  Rng rng(1);
  const std::vector<std::string> qs{"a", "b", "c", "d"};
  try {
    plan_layout(qs, cfg, rng);
    FAIL("expected a layout error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLayout);
  }
  SynthConfig tight;
  tight.frame_width = 60;
  tight.frame_height = 80;
  tight.questions_per_image = 4;
  Rng r2(2);
  CHECK_THROWS_AS(plan_layout(std::vector<std::string>{"abcd", "abcd", "abcd", "abcd"}, tight, r2), Error);
}

TEST_CASE("layouts are disjoint across many seeds") {
  SynthConfig cfg;
  const auto p = pool(40);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    cfg.seed = seed;
    cfg.num_images = 10;
    const auto samples = generate_dataset(p, cfg);
    for (size_t i = 0; i < samples.size(); i += 4) CHECK(pairwise_disjoint(*samples[i].overlay));
  }
}

TEST_CASE("sample_click") {
  Rng rng(3);
  const clickqa::BulletMessage one{"m0", "x", {10, 10, 11, 11}};
  const auto c = sample_click(one, rng);
  CHECK(c.x == 10);
  CHECK(c.y == 10);
  Rng a(5), b(5);
  const clickqa::BulletMessage box{"m0", "x", {100, 200, 300, 236}};
  for (int i = 0; i < 100; ++i) {
    const auto ca = sample_click(box, a);
    const auto cb = sample_click(box, b);
    CHECK(ca == cb);
    CHECK(box.bbox.contains(ca.x, ca.y));
  }
}

TEST_CASE("every synthesized click resolves to its gold question") {
  SynthConfig cfg;
  cfg.num_images = 200;
  cfg.seed = 11;
  const auto samples = generate_dataset(pool(50), cfg);
  REQUIRE(samples.size() == 800);
  for (const auto& s : samples) {
    const auto& m = clickqa::resolve_click(*s.overlay, s.click);
    REQUIRE(m.text == s.question_gold);
    CHECK(m.bbox.contains(s.click.x, s.click.y));
  }
}

TEST_CASE("dataset counts") {
  SynthConfig cfg;
  cfg.num_images = 2;
  CHECK(generate_dataset(pool(8), cfg).size() == 8);
  cfg.num_images = 8000;
  CHECK(generate_dataset(pool(100), cfg).size() == 32000);
  cfg.num_images = 1;
  CHECK_THROWS_AS(generate_dataset(pool(3), cfg), Error);
  // Each image carries distinct pool entries.
  cfg.num_images = 50;
  const auto s = generate_dataset(pool(6), cfg);
  for (size_t i = 0; i < s.size(); i += 4) {
    std::set<std::string> ids;
    for (size_t k = 0; k < 4; ++k) ids.insert(s[i + k].source_qa_id);
    CHECK(ids.size() == 4);
  }
}

TEST_CASE("written dataset is byte-identical per seed and reads back") {
  SynthConfig cfg;
  cfg.num_images = 20;
  cfg.seed = 42;
  const auto p = pool(30);
  const auto d1 = testutil::temp_dir("synth-a");
  const auto d2 = testutil::temp_dir("synth-b");
  write_dataset(d1.string(), generate_dataset(p, cfg), cfg);
  write_dataset(d2.string(), generate_dataset(p, cfg), cfg);
  CHECK(slurp(d1 / "manifest.jsonl") == slurp(d2 / "manifest.jsonl"));
  CHECK(slurp(d1 / "overlays/000007.json") == slurp(d2 / "overlays/000007.json"));

  const auto ds = clickqa::read_dataset((d1 / "manifest.jsonl").string());
  CHECK(ds.header.seed == 42);
  CHECK(ds.header.images == 20);
  CHECK(ds.header.samples == 80);
  REQUIRE(ds.samples.size() == 80);
  const auto orig = generate_dataset(p, cfg);
  for (size_t i = 0; i < orig.size(); ++i) {
    CHECK(ds.samples[i].click == orig[i].click);
    CHECK(ds.samples[i].question_gold == orig[i].question_gold);
    CHECK(*ds.samples[i].overlay == *orig[i].overlay);
    CHECK(ds.samples[i].category == orig[i].category);
  }

  cfg.seed = 43;
  const auto d3 = testutil::temp_dir("synth-c");
  write_dataset(d3.string(), generate_dataset(p, cfg), cfg);
  CHECK(slurp(d1 / "manifest.jsonl") != slurp(d3 / "manifest.jsonl"));
}

TEST_CASE("pool loaders") {
  const auto demo = read_qa_pool(testutil::source_path("data/demo/qa_pool.jsonl"));
  CHECK(demo.size() == 25);
  CHECK(demo[0].category == "electronics");
  const auto dir = testutil::temp_dir("clevr");
  std::ofstream(dir / "q.json") << R"({"questions": [
    {"question": "What color is the cube?", "answer": "red", "question_index": 0, "image_filename": "a.png", "question_family_index": 3},
    {"question": "How many spheres?", "answer": "2", "question_index": 1, "image_filename": "a.png", "question_family_index": 5}]})";
  const auto clevr = read_clevr_questions((dir / "q.json").string());
  REQUIRE(clevr.size() == 2);
  CHECK(clevr[0].answer == "red");
  CHECK(clevr[1].category == "family5");
  std::ofstream(dir / "bad.jsonl") << "{\"question\": \"x\"}\n";
  CHECK_THROWS_AS(read_qa_pool((dir / "bad.jsonl").string()), Error);
}
