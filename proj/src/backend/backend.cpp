#include "backend/backend.hpp"

#include "backend/http_backend.hpp"
#include "backend/mock_backend.hpp"
#include "common/error.hpp"

#include <nlohmann/json.hpp>

namespace streamcart::backend {

const char* task_name(Task t) {
  switch (t) {
  case Task::kQuestion: return "question";
  case Task::kAnswer: return "answer";
  case Task::kIntegrate: return "integrate";
  case Task::kCopy: return "copy";
  case Task::kRewrite: return "rewrite";
  case Task::kCaption: return "caption";
  case Task::kTrace: return "trace";
  case Task::kJudge: return "judge";
  }
  return "unknown";
}

void BackendProfile::validate() const {
  if (kind == Kind::kHttp && endpoint.empty())
    fail(ErrorCode::kValidation, "http backend profile requires an endpoint");
  if (timeout.count() <= 0) fail(ErrorCode::kValidation, "backend timeout must be positive");
  if (retry < 0) fail(ErrorCode::kValidation, "backend retry count must be >= 0");
  if (!(question_corruption >= 0.0 && question_corruption <= 1.0))
    fail(ErrorCode::kValidation, "question_corruption must lie in [0, 1]");
  if (!(click_radius >= 0.0)) fail(ErrorCode::kValidation, "click_radius must be >= 0");
  for (const auto& l : latency) {
    if (l.count() < 0) fail(ErrorCode::kValidation, "latency must be >= 0");
  }
}

void to_json(nlohmann::json& j, const BackendProfile& p) {
  j = {{"kind", p.kind == BackendProfile::Kind::kMock ? "mock" : "http"},
       {"timeout_ms", p.timeout.count()},
       {"retry", p.retry},
       {"seed", p.seed}};
  if (!p.endpoint.empty()) j["endpoint"] = p.endpoint;
  if (p.kind == BackendProfile::Kind::kHttp) j["model"] = p.model;
  if (p.question_corruption > 0.0) j["question_corruption"] = p.question_corruption;
  if (p.unreachable) j["unreachable"] = true;
  if (p.click_radius != clickqa::kDefaultClickRadius) j["click_radius"] = p.click_radius;
  nlohmann::json lat = nlohmann::json::object();
  for (int t = 0; t < kTaskCount; ++t) {
    if (p.latency[t].count() > 0) lat[task_name(static_cast<Task>(t))] = p.latency[t].count();
  }
  if (!lat.empty()) j["latency_ms"] = lat;
}

void from_json(const nlohmann::json& j, BackendProfile& p) {
  p = BackendProfile{};
  const auto kind = j.value("kind", std::string("mock"));
  if (kind == "mock") {
    p.kind = BackendProfile::Kind::kMock;
  } else if (kind == "http") {
    p.kind = BackendProfile::Kind::kHttp;
  } else {
    fail(ErrorCode::kValidation, "unknown backend kind '" + kind + "'");
  }
  p.endpoint = j.value("endpoint", std::string{});
  p.model = j.value("model", std::string("default"));
  p.timeout = std::chrono::milliseconds(j.value("timeout_ms", int64_t{30000}));
  p.retry = j.value("retry", 0);
  p.seed = j.value("seed", uint64_t{0});
  p.question_corruption = j.value("question_corruption", 0.0);
  p.unreachable = j.value("unreachable", false);
  p.click_radius = j.value("click_radius", clickqa::kDefaultClickRadius);
  if (j.contains("latency_ms")) {
    for (int t = 0; t < kTaskCount; ++t) {
      const char* name = task_name(static_cast<Task>(t));
      if (j["latency_ms"].contains(name))
        p.latency[t] = std::chrono::milliseconds(j["latency_ms"][name].get<int64_t>());
    }
  }
  p.validate();
}

std::shared_ptr<ModelBackend> make_backend(const BackendProfile& profile) {
  profile.validate();
  if (profile.kind == BackendProfile::Kind::kHttp) return std::make_shared<HttpBackend>(profile);
  return std::make_shared<MockBackend>(profile);
}

} // namespace streamcart::backend
