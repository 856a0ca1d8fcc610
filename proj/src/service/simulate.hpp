#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace streamcart::service {

// Scenario file: one JSON event per line, tagged by "type".
//   {"type":"scenario","version":1,"name":..,"seed":..,"judge":"exact"}   first line
//   {"type":"config","ses":{..},"kea":{..},"backend":{..},"click":{..}}
//   {"type":"lexicon","path":..}        {"type":"retrieval","path":..}
//   {"type":"product","record":{..}}  or  {"type":"product","product_id":..,
//       "materials":[{"source_kind","content","origin"}],"external_snippets":[..]}
//   {"type":"features","path":..}
//   {"type":"overlay","t":..,"overlay":{..}}  or  "path":..
//   {"type":"click","t":..,"frame_id":..,"x":..,"y":..,"question":..,"answer":..}
//   {"type":"copy","t":..,"style":..}  or  "exemplar":..
//   {"type":"purify","t":..,"text":..}
// Paths are relative to the scenario file. Timed events are replayed in
// order of t (file order on ties); frames with timestamp <= t are
// segmented and captioned before the event runs.
struct SimulationOptions {
  std::optional<uint64_t> seed;  // overrides the scenario seed
};

struct SimulationMetrics {
  size_t clicks = 0;
  size_t questions_scored = 0;
  size_t question_matches = 0;
  size_t answers_scored = 0;
  size_t answer_accepts = 0;
  double reward_sum = 0.0;
  size_t rewards = 0;
  size_t frames = 0;
  size_t segments = 0;
  size_t prefix_reused = 0;
  size_t caption_failures = 0;
  size_t prohibited_found = 0;
  size_t prohibited_delivered = 0;

  double qra() const;
  double rq() const;
  double prefix_reuse_rate() const;
};

struct SimulationResult {
  std::vector<std::string> lines;  // transcript, one JSON object per line
  SimulationMetrics metrics;

  std::string transcript() const;
};

SimulationResult run_simulation(const std::string& scenario_path, const SimulationOptions& options = {});

nlohmann::json metrics_json(const SimulationMetrics& m);

} // namespace streamcart::service
