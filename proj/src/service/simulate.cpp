#include "service/simulate.hpp"

#include "backend/mock_backend.hpp"
#include "clickqa/judge.hpp"
#include "clickqa/pipeline.hpp"
#include "clickqa/retrieval.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "memory/caption.hpp"
#include "memory/store.hpp"
#include "offline/lexicon.hpp"
#include "offline/pipeline.hpp"
#include "offline/purify.hpp"
#include "service/config.hpp"
#include "ses/feature_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

namespace streamcart::service {

namespace fs = std::filesystem;
using nlohmann::json;

double SimulationMetrics::qra() const {
  return questions_scored ? static_cast<double>(question_matches) / questions_scored : 0.0;
}
double SimulationMetrics::rq() const {
  return answers_scored ? static_cast<double>(answer_accepts) / answers_scored : 0.0;
}
double SimulationMetrics::prefix_reuse_rate() const {
  return segments ? static_cast<double>(prefix_reused) / segments : 0.0;
}

std::string SimulationResult::transcript() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

json metrics_json(const SimulationMetrics& m) {
  return {{"clicks", m.clicks},
          {"qra", m.qra()},
          {"rq", m.rq()},
          {"mean_reward", m.rewards ? m.reward_sum / m.rewards : 0.0},
          {"questions_scored", m.questions_scored},
          {"answers_scored", m.answers_scored},
          {"frames", m.frames},
          {"segments", m.segments},
          {"prefix_reused", m.prefix_reused},
          {"prefix_reuse_rate", m.prefix_reuse_rate()},
          {"caption_failures", m.caption_failures},
          {"prohibited_found", m.prohibited_found},
          {"prohibited_delivered", m.prohibited_delivered}};
}

namespace {

struct TimedEvent {
  double t = 0.0;
  size_t line = 0;
  json doc;
};

class Replay {
public:
  Replay(const std::string& path, const SimulationOptions& options) : path_(path), options_(options) {
    base_ = fs::path(path).parent_path();
  }

  SimulationResult run() {
    load();
    start();
    std::stable_sort(events_.begin(), events_.end(),
                     [](const TimedEvent& a, const TimedEvent& b) { return a.t < b.t; });
    for (const auto& ev : events_) {
      advance_to(ev.t);
      dispatch(ev);
    }
    while (next_frame_ < frames_.size()) push_frame(frames_[next_frame_++]);
    for (const auto& seg : stream_->flush()) on_segment(seg);
    emit({{"type", "metrics"}, {"metrics", metrics_json(result_.metrics)}});
    return std::move(result_);
  }

private:
  [[noreturn]] void bad(size_t line, const std::string& why) const {
    fail(ErrorCode::kValidation, path_ + ":" + std::to_string(line) + ": " + why);
  }

  std::string resolve(const std::string& p) const { return (base_ / p).string(); }

  void load() {
    std::ifstream in(path_);
    if (!in) fail(ErrorCode::kIo, "cannot open scenario: " + path_);
    std::string raw;
    size_t line = 0;
    bool header = false;
    json config_doc = json::object();
    while (std::getline(in, raw)) {
      ++line;
      if (text::trim(raw).empty()) continue;
      json doc;
      try {
        doc = json::parse(raw);
      } catch (const json::exception& e) {
        bad(line, std::string("not JSON: ") + e.what());
      }
      if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string())
        bad(line, "event needs a string \"type\"");
      const auto type = doc["type"].get<std::string>();
      try {
        if (!header) {
          if (type != "scenario") bad(line, "first event must be the scenario header");
          if (doc.value("version", 0) != 1) bad(line, "unsupported scenario version");
          name_ = doc.value("name", std::string("scenario"));
          seed_ = options_.seed.value_or(doc.value("seed", uint64_t{0}));
          judge_kind_ = clickqa::parse_judge_kind(doc.value("judge", std::string("exact")));
          header = true;
        } else if (type == "config") {
          config_doc.merge_patch(doc);
        } else if (type == "lexicon") {
          lexicon_ = offline::read_lexicon_file(resolve(doc.at("path").get<std::string>()));
        } else if (type == "retrieval") {
          retriever_ = std::make_unique<clickqa::FixtureRetriever>(
              clickqa::FixtureRetriever::from_file(resolve(doc.at("path").get<std::string>())));
        } else if (type == "product") {
          product_doc_ = doc;
          product_line_ = line;
        } else if (type == "features") {
          frames_ = ses::read_feature_file(resolve(doc.at("path").get<std::string>())).frames;
        } else if (type == "overlay" || type == "click" || type == "copy" || type == "purify") {
          if (!doc.contains("t") || !doc["t"].is_number()) bad(line, type + " event needs a numeric \"t\"");
          events_.push_back({doc["t"].get<double>(), line, doc});
        } else {
          bad(line, "unknown event type '" + type + "'");
        }
      } catch (const json::exception& e) {
        bad(line, e.what());
      } catch (const Error& e) {
        if (std::string(e.what()).rfind(path_, 0) == 0) throw;
        bad(line, e.what());
      }
    }
    if (!header) fail(ErrorCode::kValidation, path_ + ": empty scenario");
    if (product_doc_.is_null()) fail(ErrorCode::kValidation, path_ + ": scenario has no product event");

    config_doc.erase("type");
    if (!config_doc.contains("backend") || !config_doc["backend"].contains("seed"))
      config_doc["backend"]["seed"] = seed_;
    if (options_.seed) config_doc["backend"]["seed"] = *options_.seed;
    config_ = config_from_json(config_doc);
  }

  void start() {
    backend_ = backend::make_backend(config_.backend);
    mock_ = dynamic_cast<backend::MockBackend*>(backend_.get());
    if (judge_kind_ == clickqa::JudgeKind::kExact) {
      judge_ = std::make_unique<clickqa::ExactJudge>();
    } else if (judge_kind_ == clickqa::JudgeKind::kLenient) {
      judge_ = std::make_unique<clickqa::LenientJudge>();
    } else {
      judge_ = std::make_unique<clickqa::ExternalJudge>(backend_);
    }
    try {
      if (product_doc_.contains("record")) {
        record_ = product_doc_["record"].get<offline::ProductRecord>();
        record_.validate();
      } else {
        std::vector<offline::RawMaterial> materials;
        for (const auto& m : product_doc_.value("materials", json::array())) {
          materials.push_back({offline::parse_source_kind(m.value("source_kind", "text")),
                               m.at("content").get<std::string>(),
                               offline::parse_origin(m.value("origin", "user"))});
        }
        record_ = offline::integrate(product_doc_.at("product_id").get<std::string>(), materials,
                                     product_doc_.value("external_snippets", std::vector<std::string>{}),
                                     *backend_);
      }
    } catch (const json::exception& e) {
      bad(product_line_, e.what());
    }
    stream_ = std::make_unique<ses::SesStream>(config_.ses);
    emit({{"type", "start"},
          {"scenario", name_},
          {"seed", seed_},
          {"backend", backend_->name()},
          {"judge", clickqa::judge_kind_name(judge_kind_)},
          {"frames", frames_.size()},
          {"product", record_}});
  }

  void emit(const json& j) { result_.lines.push_back(j.dump()); }

  void advance_to(double t) {
    while (next_frame_ < frames_.size() && frames_[next_frame_].timestamp <= t)
      push_frame(frames_[next_frame_++]);
  }

  void push_frame(const ses::FrameFeature& f) {
    ++result_.metrics.frames;
    if (auto seg = stream_->push(f)) on_segment(*seg);
  }

  void on_segment(const ses::EventSegment& seg) {
    auto entry = memory::caption_pipeline(seg, memory_.last(), *backend_, config_.kea, seg.end_time);
    auto& m = result_.metrics;
    ++m.segments;
    if (entry.caption_source == memory::CaptionSource::kPrefixReused) ++m.prefix_reused;
    if (entry.retry) ++m.caption_failures;
    json line = entry;
    line["type"] = "segment";
    emit(line);
    memory_.append(std::move(entry));
  }

  void dispatch(const TimedEvent& ev) {
    const auto type = ev.doc["type"].get<std::string>();
    try {
      if (type == "overlay") {
        const auto overlay = ev.doc.contains("overlay")
                                 ? ev.doc["overlay"].get<clickqa::FrameOverlay>()
                                 : clickqa::read_overlay_file(resolve(ev.doc.at("path").get<std::string>()));
        overlay.validate();
        overlays_[overlay.frame_id] = overlay;
        if (mock_ != nullptr) mock_->register_overlay(overlay);
        emit({{"type", "overlay"}, {"t", ev.t}, {"frame_id", overlay.frame_id},
              {"messages", overlay.messages.size()}});
      } else if (type == "click") {
        click(ev);
      } else if (type == "copy") {
        const auto copy = ev.doc.contains("exemplar")
                              ? offline::adapt_style(record_, ev.doc["exemplar"].get<std::string>(), *backend_)
                              : offline::generate_copy(record_, ev.doc.value("style", "general"), *backend_);
        auto purified = offline::purify(copy.body, lexicon_);
        note_purification(purified);
        json phrases = json::array();
        json reports = json::array();
        for (const auto& phrase : copy.interaction_phrases) {
          auto p = offline::purify(phrase, lexicon_);
          note_purification(p);
          phrases.push_back(p.text);
          if (!p.report.empty()) reports.push_back(p.report);
        }
        emit({{"type", "copy"}, {"t", ev.t}, {"style", offline::style_name(copy.style)},
              {"body", purified.text}, {"interaction_phrases", phrases},
              {"purification", purified.report}, {"phrase_purification", reports}});
      } else if (type == "purify") {
        auto purified = offline::purify(ev.doc.at("text").get<std::string>(), lexicon_);
        note_purification(purified);
        emit({{"type", "purify"}, {"t", ev.t}, {"text", purified.text}, {"purification", purified.report}});
      }
    } catch (const json::exception& e) {
      bad(ev.line, e.what());
    }
  }

  void note_purification(const offline::PurifyResult& r) {
    result_.metrics.prohibited_found += r.report.count_before;
    result_.metrics.prohibited_delivered += offline::detect_prohibited(r.text, lexicon_).size();
  }

  void click(const TimedEvent& ev) {
    const clickqa::ClickEvent c{ev.doc.at("frame_id").get<int64_t>(), ev.doc.at("x").get<int>(),
                                ev.doc.at("y").get<int>()};
    const auto it = overlays_.find(c.frame_id);
    if (it == overlays_.end()) bad(ev.line, "click on frame " + std::to_string(c.frame_id) + " before its overlay");
    auto& m = result_.metrics;
    ++m.clicks;
    json line = {{"type", "exchange"}, {"t", ev.t}, {"frame_id", c.frame_id}, {"x", c.x}, {"y", c.y}};
    const auto frame = clickqa::render_overlay(it->second);
    const auto context = memory_.recent(config_.recent_k);
    clickqa::ClickOptions options{config_.recent_k, &lexicon_, retriever_.get()};
    std::optional<clickqa::ClickResponse> r;
    try {
      r = clickqa::respond_to_click(*backend_, frame, c, record_, context, options);
    } catch (const Error& e) {
      line["error"] = error_code_name(e.code());
      line["message"] = e.what();
    }
    const auto gold_q = ev.doc.value("question", std::string{});
    const auto gold_a = ev.doc.value("answer", std::string{});
    if (r) {
      line["question"] = r->question;
      line["answer"] = r->answer;
      line["retrieved"] = r->supplementary.has_value();
      line["purification"] = r->purification;
      m.prohibited_found += r->purification.count_before;
      m.prohibited_delivered += offline::detect_prohibited(r->answer, lexicon_).size();
    }
    if (!gold_q.empty()) {
      ++m.questions_scored;
      const bool q_ok = r && clickqa::questions_match(r->question, gold_q);
      m.question_matches += q_ok ? 1 : 0;
      if (!gold_a.empty()) {
        ++m.answers_scored;
        const bool a_ok = r && judge_->accepts(gold_q, r->answer, gold_a);
        m.answer_accepts += a_ok ? 1 : 0;
        const double reward = r ? clickqa::reward(r->question, r->answer, gold_q, gold_a, *judge_) : 0.0;
        m.reward_sum += reward;
        ++m.rewards;
        line["reward"] = reward;
      }
    }
    emit(line);
  }

  std::string path_;
  SimulationOptions options_;
  fs::path base_;
  std::string name_;
  uint64_t seed_ = 0;
  clickqa::JudgeKind judge_kind_ = clickqa::JudgeKind::kExact;
  ServiceConfig config_;
  json product_doc_;
  size_t product_line_ = 0;
  offline::Lexicon lexicon_;
  std::unique_ptr<clickqa::FixtureRetriever> retriever_;
  std::vector<ses::FrameFeature> frames_;
  size_t next_frame_ = 0;
  std::vector<TimedEvent> events_;

  std::shared_ptr<backend::ModelBackend> backend_;
  backend::MockBackend* mock_ = nullptr;
  std::unique_ptr<clickqa::Judge> judge_;
  offline::ProductRecord record_;
  std::unique_ptr<ses::SesStream> stream_;
  memory::MemoryStore memory_;
  std::map<int64_t, clickqa::FrameOverlay> overlays_;
  SimulationResult result_;
};

} // namespace

SimulationResult run_simulation(const std::string& scenario_path, const SimulationOptions& options) {
  Replay replay(scenario_path, options);
  return replay.run();
}

} // namespace streamcart::service
