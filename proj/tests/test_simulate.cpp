#include "common/error.hpp"
#include "service/simulate.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>

using namespace streamcart;
using namespace streamcart::service;
using nlohmann::json;

namespace {

std::string demo() { return testutil::source_path("data/demo/scenario.jsonl"); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

} // namespace

TEST_CASE("simulation is deterministic") {
  const auto a = run_simulation(demo());
  const auto b = run_simulation(demo());
  CHECK(a.transcript() == b.transcript());
  CHECK(run_simulation(demo(), {7}).transcript() == a.transcript());
}

TEST_CASE("demo scenario metrics") {
  const auto r = run_simulation(demo());
  const auto& m = r.metrics;
  CHECK(m.frames == 1200);
  CHECK(m.segments == 4);
  CHECK(m.prefix_reused == 3);
  CHECK(m.caption_failures == 0);
  CHECK(m.qra() == 1.0);
  CHECK(m.answers_scored > m.answer_accepts);
  CHECK(m.prohibited_found > 0);
  CHECK(m.prohibited_delivered == 0);

  REQUIRE_FALSE(r.lines.empty());
  const auto first = json::parse(r.lines.front());
  CHECK(first["type"] == "start");
  const auto last = json::parse(r.lines.back());
  CHECK(last["type"] == "metrics");
  CHECK(last["metrics"] == metrics_json(m));

  size_t no_message = 0;
  for (const auto& line : r.lines) {
    const auto j = json::parse(line);
    if (j["type"] == "exchange" && j.contains("error")) {
      CHECK(j["error"] == "no_message");
      CHECK(j["message"].is_string());
      ++no_message;
    }
  }
  CHECK(no_message == 1);
}

TEST_CASE("bad scenarios name the offending line") {
  const auto dir = testutil::temp_dir("scenario");
  const auto path = (dir / "s.jsonl").string();
  {
    std::ofstream out(path);
    out << R"({"type":"scenario","version":1,"name":"x","seed":1})" << "\n";
    out << R"({"type":"product","record":{"schema_version":1,"product_id":"p","name":"P","price":"1 USD"}})" << "\n";
    out << R"({"type":"click","t":1.0,"frame_id":5,"x":1,"y":1})" << "\n";
  }
  try {
    run_simulation(path);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("s.jsonl:3") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << R"({"type":"scenario","version":1,"name":"x","seed":1})" << "\n";
  }
  CHECK(code_of([&] { run_simulation(path); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { run_simulation((dir / "missing.jsonl").string()); }) == ErrorCode::kIo);
}
