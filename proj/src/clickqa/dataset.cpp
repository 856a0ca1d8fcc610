#include "clickqa/dataset.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>

namespace streamcart::clickqa {

nlohmann::json header_json(const DatasetHeader& h) {
  return {{"format", "streamcart-dataset"}, {"version", kDatasetVersion}, {"seed", h.seed},
          {"images", h.images},             {"per_image", h.per_image},    {"samples", h.samples}};
}

nlohmann::json sample_json(const LabeledClick& s, const std::string& overlay_path) {
  return {{"overlay", overlay_path},
          {"frame_id", s.click.frame_id},
          {"x", s.click.x},
          {"y", s.click.y},
          {"question", s.question_gold},
          {"answer", s.answer_gold},
          {"source_qa_id", s.source_qa_id},
          {"category", s.category}};
}

Dataset read_dataset(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::kIo, "cannot open dataset manifest: " + manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();
  Dataset ds;
  std::map<std::string, std::shared_ptr<const FrameOverlay>> cache;
  std::string line;
  size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto where = manifest_path + ":" + std::to_string(line_no);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!header) {
      if (doc.value("format", "") != "streamcart-dataset")
        fail(ErrorCode::kParse, where + ": missing dataset header");
      if (doc.value("version", 0) != kDatasetVersion)
        fail(ErrorCode::kMigration, where + ": unsupported dataset version");
      ds.header = {doc.value("seed", uint64_t{0}), doc.value("images", size_t{0}),
                   doc.value("per_image", size_t{0}), doc.value("samples", size_t{0})};
      header = true;
      continue;
    }
    try {
      const auto rel = doc.at("overlay").get<std::string>();
      auto& ov = cache[rel];
      if (!ov) ov = std::make_shared<const FrameOverlay>(read_overlay_file((base / rel).string()));
      LabeledClick s;
      s.overlay = ov;
      s.click = {ov->frame_id, doc.at("x").get<int>(), doc.at("y").get<int>()};
      s.question_gold = doc.at("question").get<std::string>();
      s.answer_gold = doc.at("answer").get<std::string>();
      s.source_qa_id = doc.value("source_qa_id", std::string{});
      s.category = doc.value("category", std::string{});
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, where + ": " + e.what());
    }
  }
  if (!header) fail(ErrorCode::kParse, manifest_path + ": empty dataset manifest");
  return ds;
}

} // namespace streamcart::clickqa
