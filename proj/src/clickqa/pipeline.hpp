#pragma once

#include "clickqa/overlay.hpp"
#include "clickqa/raster.hpp"
#include "memory/entry.hpp"
#include "offline/purify.hpp"
#include "offline/record.hpp"

#include <optional>
#include <string>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::clickqa {

class Retriever;

// Composites the cursor at the click and asks the backend to transcribe the
// clicked message. Throws kExtraction on an empty transcription.
std::string extract_question(backend::ModelBackend& backend, const Image& frame, const ClickEvent& click,
                             const CursorIcon& cursor = default_cursor());

// Prompt context: the record's five fields, then recent event captions,
// then retrieved material.
std::string build_answer_context(const offline::ProductRecord& record,
                                 const std::vector<std::string>& captions,
                                 const std::optional<std::string>& supplementary);

// Answers from the record plus the captions of the last `k` memory entries.
std::string answer_question(const std::string& question, const offline::ProductRecord& record,
                            const std::vector<memory::MemoryEntry>& memory_context,
                            backend::ModelBackend& backend,
                            const std::optional<std::string>& supplementary = std::nullopt,
                            size_t k = 5);

struct ClickResponse {
  std::string question;
  std::string draft_answer;
  std::optional<std::string> supplementary;
  std::string answer;  // purified
  offline::PurificationReport purification;
};

struct ClickOptions {
  size_t recent_k = 5;
  const offline::Lexicon* lexicon = nullptr;
  Retriever* retriever = nullptr;
};

// Full online path for one click: extract, answer, maybe retrieve and
// answer again, purify.
ClickResponse respond_to_click(backend::ModelBackend& backend, const Image& frame, const ClickEvent& click,
                               const offline::ProductRecord& record,
                               const std::vector<memory::MemoryEntry>& memory_context,
                               const ClickOptions& options);

} // namespace streamcart::clickqa
