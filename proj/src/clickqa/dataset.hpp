#pragma once

#include "clickqa/overlay.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace streamcart::clickqa {

struct LabeledClick {
  std::shared_ptr<const FrameOverlay> overlay;
  ClickEvent click;
  std::string question_gold;
  std::string answer_gold;
  std::string source_qa_id;
  std::string category;  // empty means uncategorized
};

struct DatasetHeader {
  uint64_t seed = 0;
  size_t images = 0;
  size_t per_image = 0;
  size_t samples = 0;
};

inline constexpr int kDatasetVersion = 1;

// Manifest: a header line
//   {"format":"streamcart-dataset","version":1,"seed":..,"images":..,"per_image":..,"samples":..}
// then one sample per line
//   {"overlay":"overlays/000000.json","x":..,"y":..,"question":..,"answer":..,
//    "source_qa_id":..,"category":..}
// Overlay paths are relative to the manifest's directory.
struct Dataset {
  DatasetHeader header;
  std::vector<LabeledClick> samples;
};

Dataset read_dataset(const std::string& manifest_path);

nlohmann::json header_json(const DatasetHeader& h);
nlohmann::json sample_json(const LabeledClick& s, const std::string& overlay_path);

} // namespace streamcart::clickqa
