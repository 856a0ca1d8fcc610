#include "datasynth/datasynth.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace streamcart::datasynth {

namespace fs = std::filesystem;

namespace {

size_t codepoints(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string overlay_name(size_t image) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "overlays/%06zu.json", image);
  return buf;
}

} // namespace

void SynthConfig::validate() const {
  if (num_images == 0) fail(ErrorCode::kValidation, "num_images must be positive");
  if (questions_per_image <= 0) fail(ErrorCode::kValidation, "questions_per_image must be positive");
  if (frame_width <= 0 || frame_height <= 0) fail(ErrorCode::kValidation, "frame size must be positive");
  if (font_box_height < 2) fail(ErrorCode::kValidation, "font_box_height must be at least 2");
  if (padding < 0) fail(ErrorCode::kValidation, "padding must be non-negative");
  if (max_attempts <= 0) fail(ErrorCode::kValidation, "max_attempts must be positive");
}

BoxSize text_box_size(const std::string& text, const SynthConfig& config) {
  const int char_w = config.font_box_height / 2;
  const size_t n = std::max<size_t>(1, codepoints(text));
  const size_t per_line = std::max<size_t>(1, static_cast<size_t>(config.frame_width * 2 / 3 / char_w));
  const size_t lines = (n + per_line - 1) / per_line;
  const size_t cols = std::min(n, per_line);
  return {static_cast<int>(cols) * char_w + 2 * config.padding,
          static_cast<int>(lines) * config.font_box_height + 2 * config.padding};
}

clickqa::FrameOverlay plan_layout(std::span<const std::string> questions, const SynthConfig& config, Rng& rng,
                                  int64_t frame_id) {
  config.validate();
  if (questions.size() != static_cast<size_t>(config.questions_per_image)) {
    fail(ErrorCode::kValidation, "plan_layout expects " + std::to_string(config.questions_per_image) +
                                     " questions, got " + std::to_string(questions.size()));
  }
  clickqa::FrameOverlay overlay;
  overlay.frame_id = frame_id;
  overlay.width = config.frame_width;
  overlay.height = config.frame_height;

  int failures = 0;
  for (size_t i = 0; i < questions.size(); ++i) {
    const auto size = text_box_size(questions[i], config);
    if (size.width > config.frame_width || size.height > config.frame_height) {
      fail(ErrorCode::kLayout, "message " + std::to_string(i) + " needs a " + std::to_string(size.width) +
                                   "x" + std::to_string(size.height) + " box, frame is " +
                                   std::to_string(config.frame_width) + "x" +
                                   std::to_string(config.frame_height));
    }
    while (true) {
      const int x = static_cast<int>(rng.between(0, config.frame_width - size.width));
      const int y = static_cast<int>(rng.between(0, config.frame_height - size.height));
      const clickqa::BBox box{x, y, x + size.width, y + size.height};
      const bool clash = std::any_of(overlay.messages.begin(), overlay.messages.end(),
                                     [&](const clickqa::BulletMessage& m) { return m.bbox.intersects(box); });
      if (!clash) {
        overlay.messages.push_back({"m" + std::to_string(i), questions[i], box});
        break;
      }
      if (++failures >= config.max_attempts) {
        fail(ErrorCode::kLayout, "could not place " + std::to_string(questions.size()) +
                                     " disjoint boxes after " + std::to_string(failures) + " attempts");
      }
    }
  }
  return overlay;
}

clickqa::ClickEvent sample_click(const clickqa::BulletMessage& message, Rng& rng, int64_t frame_id) {
  const auto& b = message.bbox;
  if (b.x_min >= b.x_max || b.y_min >= b.y_max)
    fail(ErrorCode::kValidation, "cannot sample a click in a degenerate box");
  return {frame_id, static_cast<int>(rng.between(b.x_min, b.x_max - 1)),
          static_cast<int>(rng.between(b.y_min, b.y_max - 1))};
}

std::vector<SynthSample> generate_dataset(std::span<const QAItem> pool, const SynthConfig& config) {
  config.validate();
  const auto k = static_cast<size_t>(config.questions_per_image);
  if (pool.size() < k) {
    fail(ErrorCode::kValidation, "QA pool has " + std::to_string(pool.size()) + " entries, need at least " +
                                     std::to_string(k));
  }
  std::vector<SynthSample> out;
  out.reserve(config.num_images * k);
  std::vector<size_t> order(pool.size());
  for (size_t image = 0; image < config.num_images; ++image) {
    Rng rng(mix_seed(config.seed, image));
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);

    std::vector<std::string> questions;
    for (size_t i = 0; i < k; ++i) questions.push_back(pool[order[i]].question);
    const auto frame_id = static_cast<int64_t>(image);
    auto overlay = std::make_shared<const clickqa::FrameOverlay>(plan_layout(questions, config, rng, frame_id));
    for (size_t i = 0; i < k; ++i) {
      const auto& qa = pool[order[i]];
      SynthSample s;
      s.overlay = overlay;
      s.click = sample_click(overlay->messages[i], rng, frame_id);
      s.question_gold = qa.question;
      s.answer_gold = qa.answer;
      s.source_qa_id = qa.id;
      s.category = qa.category;
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_dataset(const std::string& out_dir, const std::vector<SynthSample>& samples,
                   const SynthConfig& config) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir / "overlays", ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + (dir / "overlays").string() + ": " + ec.message());

  std::ofstream manifest(dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) fail(ErrorCode::kIo, "cannot write " + (dir / "manifest.jsonl").string());
  clickqa::DatasetHeader header{config.seed, 0, static_cast<size_t>(config.questions_per_image), samples.size()};
  const clickqa::FrameOverlay* last = nullptr;
  for (const auto& s : samples) {
    if (s.overlay.get() != last) {
      ++header.images;
      last = s.overlay.get();
    }
  }
  manifest << clickqa::header_json(header).dump() << "\n";
  last = nullptr;
  std::string rel;
  for (const auto& s : samples) {
    if (s.overlay.get() != last) {
      last = s.overlay.get();
      rel = overlay_name(static_cast<size_t>(s.overlay->frame_id));
      clickqa::write_overlay_file((dir / rel).string(), *s.overlay);
    }
    manifest << clickqa::sample_json(s, rel).dump() << "\n";
  }
  if (!manifest) fail(ErrorCode::kIo, "short write to manifest");
}

std::vector<QAItem> read_qa_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open QA pool: " + path);
  std::vector<QAItem> pool;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      QAItem item;
      item.id = doc.value("id", "qa" + std::to_string(pool.size()));
      item.question = doc.at("question").get<std::string>();
      item.answer = doc.at("answer").get<std::string>();
      item.category = doc.value("category", std::string{});
      if (text::trim(item.question).empty() || text::trim(item.answer).empty())
        fail(ErrorCode::kValidation, path + ":" + std::to_string(line_no) + ": empty question or answer");
      pool.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pool;
}

std::vector<QAItem> read_clevr_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open CLEVR question file: " + path);
  std::vector<QAItem> pool;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& q : doc.at("questions")) {
      QAItem item;
      const auto image = q.value("image_filename", std::string{"image"});
      item.id = image + "#" + std::to_string(q.value("question_index", pool.size()));
      item.question = q.at("question").get<std::string>();
      item.answer = q.at("answer").get<std::string>();
      if (q.contains("question_family_index"))
        item.category = "family" + std::to_string(q["question_family_index"].get<int>());
      pool.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return pool;
}

} // namespace streamcart::datasynth
