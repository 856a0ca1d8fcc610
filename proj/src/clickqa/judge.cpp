#include "clickqa/judge.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace streamcart::clickqa {

bool questions_match(std::string_view predicted, std::string_view gold) {
  return text::normalize_whitespace(predicted) == text::normalize_whitespace(gold);
}

bool ExactJudge::accepts(const std::string&, const std::string& predicted, const std::string& gold) {
  return text::normalize_whitespace(predicted) == text::normalize_whitespace(gold);
}

bool LenientJudge::accepts(const std::string&, const std::string& predicted, const std::string& gold) {
  const auto p = text::ascii_lower(text::normalize_whitespace(predicted));
  const auto g = text::ascii_lower(text::normalize_whitespace(gold));
  return p.find(g) != std::string::npos;
}

ExternalJudge::ExternalJudge(std::shared_ptr<backend::ModelBackend> backend)
    : backend_(std::move(backend)) {
  if (!backend_) fail(ErrorCode::kValidation, "external judge needs a backend");
}

bool ExternalJudge::accepts(const std::string& question, const std::string& predicted,
                            const std::string& gold) {
  try {
    return backend_->judge({question, predicted, gold});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kJudge) throw;
    fail(ErrorCode::kJudge, std::string("external judge failed: ") + e.what());
  }
}

JudgeKind parse_judge_kind(std::string_view s) {
  if (s == "exact") return JudgeKind::kExact;
  if (s == "lenient") return JudgeKind::kLenient;
  if (s == "external" || s == "external-model") return JudgeKind::kExternal;
  fail(ErrorCode::kValidation, "unknown judge '" + std::string(s) + "' (exact, lenient, external)");
}

const char* judge_kind_name(JudgeKind k) {
  switch (k) {
  case JudgeKind::kExact: return "exact";
  case JudgeKind::kLenient: return "lenient";
  case JudgeKind::kExternal: return "external";
  }
  return "exact";
}

double reward(const std::string& q_hat, const std::string& a_hat, const std::string& q_star,
              const std::string& a_star, Judge& judge) {
  if (text::trim(q_star).empty() || text::trim(a_star).empty())
    fail(ErrorCode::kValidation, "reward needs non-empty gold question and answer");
  if (!questions_match(q_hat, q_star)) return 0.0;
  return judge.accepts(q_star, a_hat, a_star) ? 1.0 : 0.5;
}

} // namespace streamcart::clickqa
