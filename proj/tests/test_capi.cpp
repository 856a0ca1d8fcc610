#include <streamcart/streamcart.h>

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

std::string src(const std::string& rel) { return std::string(STREAMCART_SOURCE_DIR) + "/" + rel; }

// Takes ownership of a returned string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  sc_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<sc_frame> dip_signal() {
  std::vector<sc_frame> frames;
  for (int i = 0; i < 200; ++i) {
    const double c = i == 50 ? 0.2 : 0.9;
    frames.push_back({i, i / 30.0, c, c});
  }
  return frames;
}

} // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(sc_version()) == "0.1.0");
  CHECK(std::string(sc_status_name(SC_ERR_NOT_FOUND)) == "not_found");
  double out = 0;
  CHECK(sc_ses_fuse_similarity(0.8, 0.4, 1.5, &out) == SC_ERR_VALIDATION);
  CHECK(std::string(sc_last_error()).size() > 0);
  CHECK(sc_ses_fuse_similarity(0.8, 0.4, 0.5, nullptr) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_ses_fuse_similarity(0.8, 0.4, 0.25, &out) == SC_OK);
  CHECK(out == doctest::Approx(0.25 * 0.8 + 0.75 * 0.4));
  CHECK(sc_set_log_level("loud") == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_set_log_level("warn") == SC_OK);
}

TEST_CASE("streaming through the C API matches batch segmentation") {
  sc_ses_config cfg;
  sc_ses_config_default(&cfg);
  const auto frames = dip_signal();

  sc_ses_stream* stream = nullptr;
  REQUIRE(sc_ses_stream_create(&cfg, &stream) == SC_OK);
  json streamed = json::array();
  for (const auto& f : frames) {
    sc_segment seg;
    int has = 0;
    REQUIRE(sc_ses_stream_push(stream, &f, &seg, &has) == SC_OK);
    if (has) {
      CHECK(seg.start_frame == 0);
      CHECK(seg.end_frame == 49);
      CHECK(seg.confirmed_at_frame == 82);
      streamed.push_back(seg.start_frame);
    }
  }
  char* flushed = nullptr;
  REQUIRE(sc_ses_stream_flush(stream, &flushed) == SC_OK);
  for (const auto& s : json::parse(take(flushed))) streamed.push_back(s["start_frame"]);
  // Frame ids keep increasing across a flush.
  sc_frame back{10, 0.0, 0.9, 0.9};
  sc_segment seg;
  int has = 0;
  CHECK(sc_ses_stream_push(stream, &back, &seg, &has) == SC_ERR_VALIDATION);
  sc_frame next{200, 200 / 30.0, 0.9, 0.9};
  CHECK(sc_ses_stream_push(stream, &next, &seg, &has) == SC_OK);
  CHECK(has == 0);
  sc_ses_stream_destroy(stream);

  char* batch = nullptr;
  REQUIRE(sc_ses_segment(frames.data(), frames.size(), &cfg, &batch) == SC_OK);
  json starts = json::array();
  const auto result = json::parse(take(batch));
  for (const auto& s : result["segments"]) starts.push_back(s["start_frame"]);
  CHECK(streamed == starts);
  CHECK(starts == json{0, 50});

  cfg.window_size = 1;
  CHECK(sc_ses_stream_create(&cfg, &stream) == SC_ERR_VALIDATION);
}

TEST_CASE("segmenting the demo feature file") {
  sc_ses_config cfg;
  sc_ses_config_default(&cfg);
  cfg.alpha = 3.0;
  char* out = nullptr;
  REQUIRE(sc_ses_segment_file(src("data/demo/features.csv").c_str(), &cfg, 0, &out) == SC_OK);
  const auto doc = json::parse(take(out));
  CHECK(doc["streaming_matches_offline"] == true);
  REQUIRE(doc["segments"].size() == 4);
  CHECK(doc["segments"][3]["start_frame"] == 900);
  CHECK(sc_ses_segment_file("/nonexistent.csv", &cfg, 0, &out) == SC_ERR_IO);
}

TEST_CASE("kea, reward and click resolution") {
  const double lp[] = {-0.1, -0.1, -0.1, -0.1, -0.1, -2.0, -0.1, -0.1, -0.1, -0.1};
  sc_kea_config kcfg;
  sc_kea_config_default(&kcfg);
  int64_t index = -1;
  size_t prefix = 0;
  REQUIRE(sc_kea_find_truncation(lp, 10, &kcfg, &index, &prefix) == SC_OK);
  CHECK(index == 6);
  CHECK(prefix == 5);

  double r = -1;
  REQUIRE(sc_reward("What is the price?", "39.90 USD", "What is  the price?", "39.90 USD", "exact", &r) == SC_OK);
  CHECK(r == 1.0);
  REQUIRE(sc_reward("What is the price?", "40 USD", "What is the price?", "39.90 USD", "exact", &r) == SC_OK);
  CHECK(r == 0.5);
  REQUIRE(sc_reward("what is the price", "39.90 USD", "What is the price?", "39.90 USD", "exact", &r) == SC_OK);
  CHECK(r == 0.0);
  CHECK(sc_reward("a", "b", "c", "d", "oracle", &r) == SC_ERR_VALIDATION);

  const std::string overlay =
      R"({"frame_id":1,"width":720,"height":1280,"messages":[{"message_id":"m1","text":"Price?","bbox":[10,10,100,40]}]})";
  char* msg = nullptr;
  REQUIRE(sc_clickqa_resolve(overlay.c_str(), 1, 50, 20, 24, &msg) == SC_OK);
  CHECK(json::parse(take(msg))["message_id"] == "m1");
  CHECK(sc_clickqa_resolve(overlay.c_str(), 1, 600, 1000, 24, &msg) == SC_ERR_NO_MESSAGE);
  CHECK(sc_clickqa_resolve(overlay.c_str(), 2, 50, 20, 24, &msg) == SC_ERR_VALIDATION);
  CHECK(sc_clickqa_resolve("{", 1, 50, 20, 24, &msg) != SC_OK);
}

TEST_CASE("offline pipeline through the C API") {
  sc_lexicon* lex = nullptr;
  REQUIRE(sc_lexicon_load(src("data/demo/lexicon.tsv").c_str(), &lex) == SC_OK);
  char* out = nullptr;
  REQUIRE(sc_detect_prohibited(lex, "A miracle cure.", &out) == SC_OK);
  CHECK(json::parse(take(out)).size() == 1);
  REQUIRE(sc_purify(lex, "A miracle blender.", nullptr, &out) == SC_OK);
  CHECK(json::parse(take(out))["text"] == "A blender.");

  REQUIRE(sc_offline_integrate(read_file(src("data/demo/materials.json")).c_str(), nullptr, &out) == SC_OK);
  const std::string record = take(out);
  CHECK(json::parse(record)["name"] == "BlendGo Mini Portable Blender");

  REQUIRE(sc_offline_copy(record.c_str(), "professional", nullptr, nullptr, &out) == SC_OK);
  CHECK(json::parse(take(out))["body"].get<std::string>().find("39.90 USD") != std::string::npos);
  CHECK(sc_offline_copy(record.c_str(), "professional", "exemplar", nullptr, &out) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_offline_copy(record.c_str(), nullptr, nullptr, nullptr, &out) == SC_ERR_INVALID_ARGUMENT);

  const auto dir = std::filesystem::temp_directory_path() / "streamcart-capi-store";
  std::filesystem::remove_all(dir);
  sc_record_store* store = nullptr;
  REQUIRE(sc_record_store_open(dir.c_str(), &store) == SC_OK);
  REQUIRE(sc_record_save(store, record.c_str()) == SC_OK);
  REQUIRE(sc_record_load(store, "blendgo-mini", &out) == SC_OK);
  CHECK(json::parse(take(out)) == json::parse(record));
  CHECK(sc_record_load(store, "nope", &out) == SC_ERR_NOT_FOUND);
  sc_record_store_close(store);
  sc_lexicon_destroy(lex);
  CHECK(sc_lexicon_load("/nonexistent.tsv", &lex) == SC_ERR_IO);
}

TEST_CASE("simulation through the C API") {
  char* transcript = nullptr;
  char* metrics = nullptr;
  REQUIRE(sc_simulate(src("data/demo/scenario.jsonl").c_str(), -1, &transcript, &metrics) == SC_OK);
  const auto t1 = take(transcript);
  const auto m = json::parse(take(metrics));
  CHECK(m["segments"] == 4);
  REQUIRE(sc_simulate(src("data/demo/scenario.jsonl").c_str(), -1, &transcript, &metrics) == SC_OK);
  CHECK(take(transcript) == t1);
  sc_string_free(metrics);
}

int main(int argc, char** argv) {
  sc_set_log_level("error");
  return doctest::Context(argc, argv).run();
}
