#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::clickqa {

enum class JudgeKind { kExact, kLenient, kExternal };

class Judge {
public:
  virtual ~Judge() = default;
  virtual JudgeKind kind() const = 0;
  virtual bool accepts(const std::string& question, const std::string& predicted,
                       const std::string& gold) = 0;
};

// Whitespace-normalized exact comparison.
class ExactJudge : public Judge {
public:
  JudgeKind kind() const override { return JudgeKind::kExact; }
  bool accepts(const std::string& question, const std::string& predicted, const std::string& gold) override;
};

// Accepts whenever the normalized, case-folded gold answer occurs in the
// prediction; a superset of ExactJudge.
class LenientJudge : public Judge {
public:
  JudgeKind kind() const override { return JudgeKind::kLenient; }
  bool accepts(const std::string& question, const std::string& predicted, const std::string& gold) override;
};

// Delegates to a model backend. Any backend failure surfaces as kJudge.
class ExternalJudge : public Judge {
public:
  explicit ExternalJudge(std::shared_ptr<backend::ModelBackend> backend);
  JudgeKind kind() const override { return JudgeKind::kExternal; }
  bool accepts(const std::string& question, const std::string& predicted, const std::string& gold) override;

private:
  std::shared_ptr<backend::ModelBackend> backend_;
};

JudgeKind parse_judge_kind(std::string_view s);
const char* judge_kind_name(JudgeKind k);

bool questions_match(std::string_view predicted, std::string_view gold);

// 1 when the question matches and the judge accepts the answer, 0.5 when
// only the question matches, 0 otherwise. The judge is not consulted for a
// mismatched question.
double reward(const std::string& q_hat, const std::string& a_hat, const std::string& q_star,
              const std::string& a_star, Judge& judge);

} // namespace streamcart::clickqa
