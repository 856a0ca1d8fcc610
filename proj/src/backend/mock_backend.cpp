#include "backend/mock_backend.hpp"

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "offline/record_match.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>
#include <thread>

namespace streamcart::backend {

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Marker prefix -> integration field.
const char* field_for_marker(const std::string& marker) {
  static const std::pair<const char*, const char*> kMarkers[] = {
      {"name", "name"},
      {"product name", "name"},
      {"price", "price"},
      {"spec", "specifications"},
      {"specs", "specifications"},
      {"specification", "specifications"},
      {"specifications", "specifications"},
      {"feature", "key_features"},
      {"features", "key_features"},
      {"key feature", "key_features"},
      {"key features", "key_features"},
      {"service", "service_details"},
      {"services", "service_details"},
      {"service details", "service_details"},
  };
  for (const auto& [m, f] : kMarkers) {
    if (marker == m) return f;
  }
  return nullptr;
}

} // namespace

MockBackend::MockBackend(BackendProfile profile)
    : profile_(std::move(profile)), unreachable_(profile_.unreachable) {}

void MockBackend::enter(Task t) {
  calls_[static_cast<size_t>(t)].fetch_add(1);
  const auto delay = profile_.latency[static_cast<size_t>(t)];
  if (delay.count() > 0) std::this_thread::sleep_for(delay);
  if (unreachable_.load())
    fail(ErrorCode::kTransport, std::string("mock backend unreachable (") + task_name(t) + ")");
}

void MockBackend::register_overlay(const clickqa::FrameOverlay& overlay) {
  std::unique_lock lock(mu_);
  overlays_[overlay.frame_id] = overlay;
}

void MockBackend::register_answer(const std::string& question, const std::string& answer) {
  std::unique_lock lock(mu_);
  answers_[text::normalize_whitespace(question)] = answer;
}

void MockBackend::set_trace(const std::string& caption, const std::vector<double>& log_probs) {
  std::unique_lock lock(mu_);
  traces_[caption] = log_probs;
}

bool MockBackend::corrupts(const clickqa::ClickEvent& click) const {
  if (profile_.question_corruption <= 0.0) return false;
  const uint64_t key = mix_seed(profile_.seed, (static_cast<uint64_t>(click.frame_id) << 32) ^
                                                   (static_cast<uint64_t>(click.x) << 16) ^
                                                   static_cast<uint64_t>(click.y));
  Rng rng(key);
  return rng.unit() < profile_.question_corruption;
}

std::string MockBackend::corrupt(const std::string& question, uint64_t key) {
  auto words = text::split_whitespace(question);
  if (words.size() < 2) return question + " ??";
  Rng rng(key);
  words.erase(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size())));
  return text::join(words, " ");
}

std::string MockBackend::extract_question(const QuestionRequest& req) {
  enter(Task::kQuestion);
  clickqa::FrameOverlay overlay;
  {
    std::shared_lock lock(mu_);
    const auto it = overlays_.find(req.click.frame_id);
    if (it == overlays_.end()) {
      fail(ErrorCode::kExtraction,
           "mock backend has no overlay for frame " + std::to_string(req.click.frame_id));
    }
    overlay = it->second;
  }
  std::string q = clickqa::resolve_click(overlay, req.click, profile_.click_radius).text;
  if (corrupts(req.click)) {
    q = corrupt(q, mix_seed(profile_.seed ^ 0xC0FFEEULL, static_cast<uint64_t>(req.click.frame_id)));
  }
  return q;
}

std::string MockBackend::answer(const AnswerRequest& req) {
  enter(Task::kAnswer);
  {
    std::shared_lock lock(mu_);
    const auto it = answers_.find(text::normalize_whitespace(req.question));
    if (it != answers_.end()) return it->second;
  }
  std::vector<std::string> parts;
  for (const auto& hit : offline::match_record_fields(req.question, req.record)) {
    parts.push_back(hit.field == "specifications" ? hit.value : hit.field + ": " + hit.value);
  }
  for (const auto& caption : req.memory_captions) {
    if (offline::shares_keyword(req.question, caption)) parts.push_back("earlier in the stream: " + caption);
  }
  if (req.supplementary && offline::shares_keyword(req.question, *req.supplementary))
    parts.push_back(*req.supplementary);
  if (parts.empty()) return kFallbackAnswer;
  return text::join(parts, "; ");
}

std::string MockBackend::integrate(const IntegrationRequest& req) {
  enter(Task::kIntegrate);
  nlohmann::json out = {{"name", nlohmann::json::array()},
                        {"price", nlohmann::json::array()},
                        {"specifications", nlohmann::json::array()},
                        {"key_features", nlohmann::json::array()},
                        {"service_details", nlohmann::json::array()}};
  std::set<std::string> seen;
  for (const auto& src : req.sources) {
    std::string_view rest(src.text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      const std::string line = text::normalize_whitespace(rest.substr(0, nl));
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const char* field = field_for_marker(text::ascii_lower(text::trim(line.substr(0, colon))));
      const std::string value = text::trim(line.substr(colon + 1));
      if (field == nullptr || value.empty()) continue;
      if (!seen.insert(line).second) continue;
      out[field].push_back({{"value", value}, {"origin", offline::origin_name(src.origin)}});
    }
  }
  return out.dump();
}

CopyReply MockBackend::write_copy(const CopyRequest& req) {
  enter(Task::kCopy);
  const auto& r = req.record;
  const std::string features = r.key_features.empty() ? "thoughtful details" : text::join(r.key_features, ", ");
  const std::string price = r.price.empty() ? "a fair price" : r.price;
  CopyReply reply;
  switch (req.style) {
  case offline::CopyStyle::kLiterary:
    reply.body = "Some mornings deserve a small ceremony. " + r.name + " brings " + features +
                 " to the quiet moments at home, and it is yours for " + price + ".";
    break;
  case offline::CopyStyle::kProfessional: {
    std::vector<std::string> specs;
    for (const auto& s : r.specifications) specs.push_back(s.key + " " + s.value);
    reply.body = r.name + ". Price: " + price + ". Specifications: " +
                 (specs.empty() ? "see listing" : text::join(specs, "; ")) + ". Highlights: " + features + ".";
    break;
  }
  case offline::CopyStyle::kGeneral:
    reply.body = "Check out " + r.name + " for just " + price + "! You get " + features + ".";
    break;
  }
  if (!r.service_details.empty()) reply.body += " Plus: " + text::join(r.service_details, "; ") + ".";
  if (req.exemplar) reply.body = "[style " + exemplar_fingerprint(*req.exemplar) + "] " + reply.body;
  reply.interaction_phrases = {"Drop a 1 in the chat if you want the link!",
                               "Tap the cart below before stock runs out.",
                               "Ask me anything about " + r.name + "."};
  return reply;
}

std::string MockBackend::rewrite(const RewriteRequest& req) {
  enter(Task::kRewrite);
  // Case-sensitive removal only; case variants are left to the lexicon pass.
  std::string out = req.text;
  for (const auto& term : req.flagged_terms) {
    if (term.empty()) continue;
    size_t pos = 0;
    while ((pos = out.find(term, pos)) != std::string::npos) out.erase(pos, term.size());
  }
  return text::normalize_whitespace(out);
}

std::string MockBackend::fresh_caption(const ses::EventSegment& segment) {
  return "the host shows the product in frames " + caption_tail(segment);
}

std::string MockBackend::caption_tail(const ses::EventSegment& segment) {
  return std::to_string(segment.start_frame) + " to " + std::to_string(segment.end_frame);
}

std::vector<kea::TokenScore> MockBackend::default_trace(const std::string& caption) {
  std::vector<kea::TokenScore> out;
  const auto tokens = text::split_whitespace(caption);
  for (size_t i = 0; i < tokens.size(); ++i)
    out.push_back({i + 1, tokens[i], all_digits(tokens[i]) ? -2.0 : -0.1});
  return out;
}

std::string MockBackend::exemplar_fingerprint(const std::string& exemplar) {
  return text::hex64(text::fnv1a64(exemplar)).substr(0, 8);
}

CaptionReply MockBackend::caption(const CaptionRequest& req) {
  enter(Task::kCaption);
  CaptionReply reply;
  reply.text = req.prefix_tokens.empty()
                   ? fresh_caption(req.segment)
                   : text::join(req.prefix_tokens, " ") + " " + caption_tail(req.segment);
  std::shared_lock lock(mu_);
  const auto it = traces_.find(reply.text);
  if (it != traces_.end()) {
    const auto tokens = text::split_whitespace(reply.text);
    for (size_t i = 0; i < it->second.size(); ++i)
      reply.scores.push_back({i + 1, i < tokens.size() ? tokens[i] : std::string{}, it->second[i]});
  } else {
    reply.scores = default_trace(reply.text);
  }
  return reply;
}

std::vector<kea::TokenScore> MockBackend::caption_trace(const std::string& caption) {
  enter(Task::kTrace);
  std::shared_lock lock(mu_);
  const auto it = traces_.find(caption);
  if (it == traces_.end()) return default_trace(caption);
  const auto tokens = text::split_whitespace(caption);
  std::vector<kea::TokenScore> out;
  for (size_t i = 0; i < it->second.size(); ++i)
    out.push_back({i + 1, i < tokens.size() ? tokens[i] : std::string{}, it->second[i]});
  return out;
}

bool MockBackend::judge(const JudgeRequest& req) {
  enter(Task::kJudge);
  return text::normalize_whitespace(req.predicted_answer) == text::normalize_whitespace(req.gold_answer);
}

} // namespace streamcart::backend
