#pragma once

#include "clickqa/dataset.hpp"
#include "common/random.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace streamcart::datasynth {

struct SynthConfig {
  size_t num_images = 8000;
  int questions_per_image = 4;
  uint64_t seed = 42;
  int frame_width = 720;
  int frame_height = 1280;
  int font_box_height = 24;  // text line height; a character is half as wide
  int padding = 6;
  int max_attempts = 1000;   // failed placements tolerated per layout

  void validate() const;
};

struct QAItem {
  std::string id;
  std::string question;
  std::string answer;
  std::string category;
};

using SynthSample = clickqa::LabeledClick;

// Box size for a message: characters are font_box_height/2 wide, text wraps
// at two thirds of the frame width.
struct BoxSize {
  int width = 0;
  int height = 0;
};
BoxSize text_box_size(const std::string& text, const SynthConfig& config);

// Places one box per question at seeded random positions, pairwise
// disjoint. Throws kLayout when a box cannot fit or placement keeps failing.
clickqa::FrameOverlay plan_layout(std::span<const std::string> questions, const SynthConfig& config, Rng& rng,
                                  int64_t frame_id = 0);

// Uniform pixel inside the (half-open) box.
clickqa::ClickEvent sample_click(const clickqa::BulletMessage& message, Rng& rng, int64_t frame_id = 0);

// Image i draws questions_per_image distinct pool entries and its layout
// from Rng(mix_seed(seed, i)), so images are independent of each other.
std::vector<SynthSample> generate_dataset(std::span<const QAItem> pool, const SynthConfig& config);

// Writes <out>/manifest.jsonl and <out>/overlays/NNNNNN.json.
void write_dataset(const std::string& out_dir, const std::vector<SynthSample>& samples,
                   const SynthConfig& config);

// QA pool, JSONL: {"id","question","answer","category"} per line (id and
// category optional).
std::vector<QAItem> read_qa_pool(const std::string& path);

// CLEVR question file ({"questions": [{"question","answer",
// "question_index","image_filename","question_family_index"}, ...]}).
std::vector<QAItem> read_clevr_questions(const std::string& path);

} // namespace streamcart::datasynth
