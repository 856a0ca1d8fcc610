#include "clickqa/evaluate.hpp"

#include "backend/mock_backend.hpp"
#include "clickqa/pipeline.hpp"
#include "common/error.hpp"

#include <nlohmann/json.hpp>

namespace streamcart::clickqa {

EvalMetrics evaluate_dataset(const std::vector<LabeledClick>& samples, backend::ModelBackend& backend,
                             Judge& judge, const offline::ProductRecord& record) {
  if (samples.empty()) fail(ErrorCode::kValidation, "evaluation needs at least one sample");
  EvalMetrics m;
  const FrameOverlay* rendered_for = nullptr;
  Image frame;
  for (const auto& s : samples) {
    if (!s.overlay) fail(ErrorCode::kValidation, "sample without an overlay");
    if (rendered_for != s.overlay.get()) {
      frame = render_overlay(*s.overlay);
      rendered_for = s.overlay.get();
    }
    auto& cat = m.per_category[s.category.empty() ? "uncategorized" : s.category];
    ++cat.samples;
    ++m.overall.samples;

    std::string q_hat;
    try {
      q_hat = extract_question(backend, frame, s.click);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kExtraction && e.code() != ErrorCode::kNoMessage) throw;
      ++m.extraction_failures;
      continue;
    }
    const bool q_ok = questions_match(q_hat, s.question_gold);
    const auto a_hat = answer_question(q_hat, record, {}, backend);
    const bool a_ok = judge.accepts(s.question_gold, a_hat, s.answer_gold);
    const double r = q_ok ? (a_ok ? 1.0 : 0.5) : 0.0;
    for (auto* c : {&cat, &m.overall}) {
      c->question_matches += q_ok ? 1 : 0;
      c->answer_accepts += a_ok ? 1 : 0;
      c->reward_sum += r;
    }
  }
  return m;
}

void prime_mock(backend::MockBackend& mock, const std::vector<LabeledClick>& samples) {
  const FrameOverlay* last = nullptr;
  for (const auto& s : samples) {
    if (s.overlay.get() != last) {
      mock.register_overlay(*s.overlay);
      last = s.overlay.get();
    }
    mock.register_answer(s.question_gold, s.answer_gold);
  }
}

namespace {

nlohmann::json category_json(const CategoryMetrics& c) {
  return {{"samples", c.samples},       {"question_matches", c.question_matches},
          {"answer_accepts", c.answer_accepts}, {"qra", c.qra()},
          {"rq", c.rq()},               {"mean_reward", c.mean_reward()}};
}

} // namespace

nlohmann::json metrics_json(const EvalMetrics& m) {
  nlohmann::json cats = nlohmann::json::object();
  double macro = 0.0;
  for (const auto& [name, c] : m.per_category) {
    cats[name] = category_json(c);
    macro += c.rq();
  }
  return {{"overall", category_json(m.overall)},
          {"per_category", cats},
          {"rq_category_macro_mean", m.per_category.empty() ? 0.0 : macro / m.per_category.size()},
          {"extraction_failures", m.extraction_failures},
          {"reference", {{"qra", kReferenceQra}, {"rq", kReferenceRq}, {"asserted", false}}}};
}

} // namespace streamcart::clickqa
