#pragma once

#include "clickqa/overlay.hpp"
#include "clickqa/raster.hpp"
#include "kea/kea.hpp"
#include "offline/record.hpp"
#include "offline/style.hpp"
#include "ses/ses.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace streamcart::backend {

// Every model call the engine makes goes through one of these typed tasks.
// The mock implements them with fixed deterministic contracts; the HTTP
// backend turns each into a chat-completion request.

struct QuestionRequest {
  clickqa::Image prompted_frame;  // frame with the cursor composited at the click
  clickqa::ClickEvent click;
};

struct AnswerRequest {
  std::string question;
  offline::ProductRecord record;
  std::vector<std::string> memory_captions;  // oldest first
  std::optional<std::string> supplementary;  // retrieved context, when any
  std::string context;                       // assembled prompt context
};

struct SourcedText {
  offline::Origin origin = offline::Origin::kUser;
  std::string text;
};

// Output contract: a JSON object mapping each of name, price,
// specifications, key_features, service_details to a list of
// {"value": ..., "origin": "user"|"external-retrieval"} candidates.
struct IntegrationRequest {
  std::string product_id;
  std::vector<SourcedText> sources;
};

struct CopyRequest {
  offline::ProductRecord record;
  offline::CopyStyle style = offline::CopyStyle::kGeneral;
  std::optional<std::string> exemplar;  // user-supplied style reference
};

struct CopyReply {
  std::string body;
  std::vector<std::string> interaction_phrases;
};

struct RewriteRequest {
  std::string text;
  std::vector<std::string> flagged_terms;
};

struct CaptionRequest {
  ses::EventSegment segment;
  std::vector<std::string> prefix_tokens;  // trace token texts of the reused prefix; empty for a fresh caption
};

struct CaptionReply {
  std::string text;
  std::vector<kea::TokenScore> scores;  // may be empty if the backend has none
};

struct JudgeRequest {
  std::string question;
  std::string predicted_answer;
  std::string gold_answer;
};

enum class Task { kQuestion, kAnswer, kIntegrate, kCopy, kRewrite, kCaption, kTrace, kJudge };
inline constexpr int kTaskCount = 8;
const char* task_name(Task t);

class ModelBackend {
public:
  virtual ~ModelBackend() = default;

  virtual std::string name() const = 0;
  virtual std::string extract_question(const QuestionRequest& req) = 0;
  virtual std::string answer(const AnswerRequest& req) = 0;
  virtual std::string integrate(const IntegrationRequest& req) = 0;
  virtual CopyReply write_copy(const CopyRequest& req) = 0;
  virtual std::string rewrite(const RewriteRequest& req) = 0;
  virtual CaptionReply caption(const CaptionRequest& req) = 0;
  virtual std::vector<kea::TokenScore> caption_trace(const std::string& caption) = 0;
  virtual bool judge(const JudgeRequest& req) = 0;
};

// Literal answer the mock (and the retrieval trigger) treat as "no answer".
inline constexpr const char* kFallbackAnswer = "not specified";

struct BackendProfile {
  enum class Kind { kMock, kHttp } kind = Kind::kMock;
  std::string endpoint;  // http kind
  std::string model = "default";
  std::chrono::milliseconds timeout{30000};
  int retry = 0;
  uint64_t seed = 0;  // mock kind
  double question_corruption = 0.0;  // mock kind
  std::chrono::milliseconds latency[kTaskCount] = {};  // mock kind, per task
  bool unreachable = false;  // mock kind: every call fails with a transport error
  double click_radius = clickqa::kDefaultClickRadius;  // mock kind: near-miss radius

  void validate() const;
};

void to_json(nlohmann::json& j, const BackendProfile& p);
void from_json(const nlohmann::json& j, BackendProfile& p);

std::shared_ptr<ModelBackend> make_backend(const BackendProfile& profile);

} // namespace streamcart::backend
