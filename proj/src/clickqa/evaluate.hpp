#pragma once

#include "clickqa/dataset.hpp"
#include "clickqa/judge.hpp"
#include "offline/record.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
class MockBackend;
}

namespace streamcart::clickqa {

struct CategoryMetrics {
  size_t samples = 0;
  size_t question_matches = 0;
  size_t answer_accepts = 0;
  double reward_sum = 0.0;

  double qra() const { return samples ? static_cast<double>(question_matches) / samples : 0.0; }
  double rq() const { return samples ? static_cast<double>(answer_accepts) / samples : 0.0; }
  double mean_reward() const { return samples ? reward_sum / samples : 0.0; }
};

struct EvalMetrics {
  CategoryMetrics overall;
  std::map<std::string, CategoryMetrics> per_category;
  size_t extraction_failures = 0;
};

// Published figures of the trained system, carried for comparison only.
inline constexpr double kReferenceQra = 0.913;
inline constexpr double kReferenceRq = 0.876;

// For every sample: render the overlay, extract the question at the click,
// answer it against `record`, score with the judge. A failed extraction
// counts as a miss. Samples without a category go under "uncategorized".
EvalMetrics evaluate_dataset(const std::vector<LabeledClick>& samples, backend::ModelBackend& backend,
                             Judge& judge, const offline::ProductRecord& record);

// Gives the mock what a trained model would know about the dataset: each
// overlay for geometric extraction and each gold QA pair for answering.
void prime_mock(backend::MockBackend& mock, const std::vector<LabeledClick>& samples);

nlohmann::json metrics_json(const EvalMetrics& m);

} // namespace streamcart::clickqa
