#pragma once

#include "backend/backend.hpp"

#include <array>
#include <atomic>
#include <map>
#include <shared_mutex>
#include <unordered_map>

namespace streamcart::backend {

// Deterministic stand-in for every model task.
//
//  extract_question  geometric truth: resolve_click over the overlay
//                    registered for the click's frame; a seeded fraction
//                    of clicks (question_corruption) is garbled.
//  answer            registered QA pairs first, then keyword lookup over
//                    the record fields, memory captions and retrieved
//                    context; otherwise kFallbackAnswer.
//  integrate         "field: value" marker lines per source, exact
//                    duplicate lines dropped, everything else ignored.
//  write_copy        one fixed template per style, carrying name and price
//                    verbatim; an exemplar adds a "[style <hash>]" prefix.
//  caption           fresh: "the host shows the product in frames S to E";
//                    continued: prefix tokens + " S to E".
//  caption_trace     registered trace, else -2.0 for numeric tokens and
//                    -0.1 for everything else.
//  judge             whitespace-normalized exact match.
class MockBackend : public ModelBackend {
public:
  explicit MockBackend(BackendProfile profile = {});

  std::string name() const override { return "mock"; }
  std::string extract_question(const QuestionRequest& req) override;
  std::string answer(const AnswerRequest& req) override;
  std::string integrate(const IntegrationRequest& req) override;
  CopyReply write_copy(const CopyRequest& req) override;
  std::string rewrite(const RewriteRequest& req) override;
  CaptionReply caption(const CaptionRequest& req) override;
  std::vector<kea::TokenScore> caption_trace(const std::string& caption) override;
  bool judge(const JudgeRequest& req) override;

  void register_overlay(const clickqa::FrameOverlay& overlay);
  void register_answer(const std::string& question, const std::string& answer);
  void set_trace(const std::string& caption, const std::vector<double>& log_probs);
  void set_unreachable(bool v) { unreachable_.store(v); }

  // Whether the seeded schedule garbles the question for this click.
  bool corrupts(const clickqa::ClickEvent& click) const;
  static std::string corrupt(const std::string& question, uint64_t key);

  static std::string fresh_caption(const ses::EventSegment& segment);
  static std::string caption_tail(const ses::EventSegment& segment);
  static std::vector<kea::TokenScore> default_trace(const std::string& caption);
  static std::string exemplar_fingerprint(const std::string& exemplar);

  uint64_t calls(Task t) const { return calls_[static_cast<size_t>(t)].load(); }

private:
  void enter(Task t);

  BackendProfile profile_;
  std::atomic<bool> unreachable_;
  std::array<std::atomic<uint64_t>, kTaskCount> calls_{};
  mutable std::shared_mutex mu_;
  std::unordered_map<int64_t, clickqa::FrameOverlay> overlays_;
  std::map<std::string, std::string> answers_;  // keyed by normalized question
  std::map<std::string, std::vector<double>> traces_;
};

} // namespace streamcart::backend
