#include "clickqa/pipeline.hpp"

#include "backend/backend.hpp"
#include "clickqa/retrieval.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace streamcart::clickqa {

std::string extract_question(backend::ModelBackend& backend, const Image& frame, const ClickEvent& click,
                             const CursorIcon& cursor) {
  backend::QuestionRequest req{compose_visual_prompt(frame, click, cursor), click};
  auto q = text::trim(backend.extract_question(req));
  if (q.empty()) fail(ErrorCode::kExtraction, "backend returned an empty transcription");
  return q;
}

std::string build_answer_context(const offline::ProductRecord& r, const std::vector<std::string>& captions,
                                 const std::optional<std::string>& supplementary) {
  std::string s = "Product name: " + r.name + "\nPrice: " + r.price + "\nSpecifications:";
  for (const auto& sp : r.specifications) s += "\n- " + sp.key + ": " + sp.value;
  s += "\nKey features:";
  for (const auto& f : r.key_features) s += "\n- " + f;
  s += "\nService details:";
  for (const auto& d : r.service_details) s += "\n- " + d;
  if (!captions.empty()) {
    s += "\nRecent stream events:";
    for (const auto& c : captions) s += "\n- " + c;
  }
  if (supplementary) s += "\nSupplementary information:\n" + *supplementary;
  return s;
}

std::string answer_question(const std::string& question, const offline::ProductRecord& record,
                            const std::vector<memory::MemoryEntry>& memory_context,
                            backend::ModelBackend& backend, const std::optional<std::string>& supplementary,
                            size_t k) {
  if (text::trim(question).empty()) fail(ErrorCode::kValidation, "question must be non-empty");
  std::vector<std::string> captions;
  const size_t from = memory_context.size() > k ? memory_context.size() - k : 0;
  for (size_t i = from; i < memory_context.size(); ++i) {
    if (!memory_context[i].caption.empty()) captions.push_back(memory_context[i].caption);
  }
  backend::AnswerRequest req{question, record, captions, supplementary,
                             build_answer_context(record, captions, supplementary)};
  return text::trim(backend.answer(req));
}

ClickResponse respond_to_click(backend::ModelBackend& backend, const Image& frame, const ClickEvent& click,
                               const offline::ProductRecord& record,
                               const std::vector<memory::MemoryEntry>& memory_context,
                               const ClickOptions& options) {
  ClickResponse out;
  out.question = extract_question(backend, frame, click);
  out.draft_answer = answer_question(out.question, record, memory_context, backend, std::nullopt, options.recent_k);
  std::string answer = out.draft_answer;
  out.supplementary = maybe_retrieve(out.question, out.draft_answer, record, options.retriever);
  if (out.supplementary)
    answer = answer_question(out.question, record, memory_context, backend, out.supplementary, options.recent_k);
  if (options.lexicon != nullptr) {
    auto purified = offline::purify(answer, *options.lexicon);
    out.answer = std::move(purified.text);
    out.purification = std::move(purified.report);
  } else {
    out.answer = std::move(answer);
  }
  return out;
}

} // namespace streamcart::clickqa
