#pragma once

#include "backend/backend.hpp"

#include <nlohmann/json.hpp>

namespace streamcart::backend {

// Talks to any server exposing an OpenAI-style chat-completions endpoint.
// `profile.endpoint` is the full URL, e.g.
// http://127.0.0.1:8000/v1/chat/completions. Token log-probabilities are
// requested for caption tasks and read from choices[0].logprobs.content.
class HttpBackend : public ModelBackend {
public:
  explicit HttpBackend(BackendProfile profile);

  std::string name() const override { return "http"; }
  std::string extract_question(const QuestionRequest& req) override;
  std::string answer(const AnswerRequest& req) override;
  std::string integrate(const IntegrationRequest& req) override;
  CopyReply write_copy(const CopyRequest& req) override;
  std::string rewrite(const RewriteRequest& req) override;
  CaptionReply caption(const CaptionRequest& req) override;
  std::vector<kea::TokenScore> caption_trace(const std::string& caption) override;
  bool judge(const JudgeRequest& req) override;

  struct Reply {
    std::string content;
    std::vector<kea::TokenScore> scores;
  };

  // One chat round trip; `user` is either a string or a content-part array.
  Reply chat(const std::string& system, const nlohmann::json& user, bool logprobs);

private:
  BackendProfile profile_;
  std::string host_;  // scheme://host:port
  std::string path_;
};

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url);

} // namespace streamcart::backend
