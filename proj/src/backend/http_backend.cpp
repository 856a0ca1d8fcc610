#include "backend/http_backend.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <httplib.h>

#include <thread>

namespace streamcart::backend {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) fail(ErrorCode::kValidation, "endpoint must be an http URL: " + url);
  if (url.compare(0, scheme, "http") != 0)
    fail(ErrorCode::kValidation, "only http:// endpoints are supported: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, slash), url.substr(slash)};
}

HttpBackend::HttpBackend(BackendProfile profile) : profile_(std::move(profile)) {
  if (profile_.endpoint.empty()) fail(ErrorCode::kValidation, "http backend requires an endpoint");
  std::tie(host_, path_) = split_url(profile_.endpoint);
}

HttpBackend::Reply HttpBackend::chat(const std::string& system, const nlohmann::json& user,
                                     bool logprobs) {
  nlohmann::json body = {{"model", profile_.model},
                         {"temperature", 0},
                         {"messages",
                          {{{"role", "system"}, {"content", system}},
                           {{"role", "user"}, {"content", user}}}}};
  if (logprobs) body["logprobs"] = true;
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= profile_.retry; ++attempt) {
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_error = "request to " + profile_.endpoint + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "backend returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorCode::kTransport, "backend returned HTTP " + std::to_string(res->status) + ": " +
                                      res->body.substr(0, 200));
    }
    try {
      const auto doc = nlohmann::json::parse(res->body);
      const auto& choice = doc.at("choices").at(0);
      Reply reply;
      reply.content = choice.at("message").at("content").get<std::string>();
      if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
          choice["logprobs"].contains("content")) {
        size_t pos = 1;
        for (const auto& t : choice["logprobs"]["content"]) {
          reply.scores.push_back({pos++, t.value("token", std::string{}), t.at("logprob").get<double>()});
        }
      }
      return reply;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kTransport, std::string("malformed chat-completion response: ") + e.what());
    }
  }
  fail(ErrorCode::kTransport, last_error);
}

namespace {

std::string record_context(const offline::ProductRecord& r) {
  std::string s = "Product: " + r.name + "\nPrice: " + r.price + "\nSpecifications:";
  for (const auto& sp : r.specifications) s += "\n- " + sp.key + ": " + sp.value;
  s += "\nKey features:";
  for (const auto& f : r.key_features) s += "\n- " + f;
  s += "\nService details:";
  for (const auto& d : r.service_details) s += "\n- " + d;
  return s;
}

std::string json_slice(const std::string& content) {
  const auto b = content.find('{');
  const auto e = content.rfind('}');
  if (b == std::string::npos || e == std::string::npos || e < b) return content;
  return content.substr(b, e - b + 1);
}

} // namespace

std::string HttpBackend::extract_question(const QuestionRequest& req) {
  const auto& img = req.prompted_frame;
  const nlohmann::json user = nlohmann::json::array(
      {{{"type", "text"},
        {"text", "The streamer clicked at pixel (" + std::to_string(req.click.x) + ", " +
                     std::to_string(req.click.y) + ") of this " + std::to_string(img.width) + "x" +
                     std::to_string(img.height) +
                     " frame; a mouse cursor marks the spot. Transcribe the viewer message under "
                     "the cursor exactly, with no other text."}},
       {{"type", "image_url"},
        {"image_url",
         {{"url", "data:image/png;base64," + clickqa::base64_encode(clickqa::encode_png(img))}}}}});
  auto reply = chat("You read viewer bullet messages on live-commerce video frames.", user, false);
  return text::trim(reply.content);
}

std::string HttpBackend::answer(const AnswerRequest& req) {
  const std::string system =
      "You are a live-commerce assistant answering a viewer question for the streamer. Use only "
      "the product data and stream history provided. If the answer is not in the data, reply "
      "exactly: " + std::string(kFallbackAnswer);
  return text::trim(chat(system, req.context + "\n\nViewer question: " + req.question, false).content);
}

std::string HttpBackend::integrate(const IntegrationRequest& req) {
  std::string user =
      "Think step by step. 1) Extract every product attribute from the user-provided material. "
      "2) Supplement it from the external material about the same product. 3) Remove repeated "
      "statements and anything unrelated to the product. Then output only a JSON object with keys "
      "name, price, specifications, key_features, service_details; each maps to a list of "
      "{\"value\": string, \"origin\": \"user\" | \"external-retrieval\"}. Specifications values "
      "are written as \"key: value\".\n";
  for (const auto& s : req.sources) {
    user += std::string("\n[") + offline::origin_name(s.origin) + " material]\n" + s.text + "\n";
  }
  return json_slice(chat("You organise product information for live-commerce streamers.", user, false).content);
}

CopyReply HttpBackend::write_copy(const CopyRequest& req) {
  std::string user = "Write live-stream promotional copy in a " + std::string(offline::style_name(req.style)) +
                     " tone for the product below. Use scenario-based narrative and emotional cues. "
                     "Also give three short interaction phrases the streamer can say to viewers.";
  if (req.exemplar) {
    user += " Imitate the writing style of this example:\n\"\"\"\n" + *req.exemplar + "\n\"\"\"";
  }
  user += "\nOutput only JSON: {\"body\": string, \"interaction_phrases\": [string]}.\n\n" +
          record_context(req.record);
  const auto content = chat("You are a copywriter for live-stream commerce.", user, false).content;
  CopyReply reply;
  try {
    const auto doc = nlohmann::json::parse(json_slice(content));
    reply.body = doc.at("body").get<std::string>();
    reply.interaction_phrases = doc.value("interaction_phrases", std::vector<std::string>{});
  } catch (const nlohmann::json::exception&) {
    reply.body = text::trim(content);
  }
  return reply;
}

std::string HttpBackend::rewrite(const RewriteRequest& req) {
  std::string user =
      "Prohibited terms are absolute claims, medical or miracle claims, and wording banned by "
      "platform community guidelines. Step by step: identify every problematic phrase, then revise "
      "or remove it while keeping the text fluent and its meaning intact. Flagged terms: " +
      text::join(req.flagged_terms, ", ") + ".\nOutput only the revised text.\n\n" + req.text;
  return text::trim(chat("You make live-stream copy compliant.", user, false).content);
}

CaptionReply HttpBackend::caption(const CaptionRequest& req) {
  const auto& s = req.segment;
  std::string user = "Describe in one sentence the event shown in frames " + std::to_string(s.start_frame) +
                     " to " + std::to_string(s.end_frame) + " of the live stream.";
  // Chat-completion tokens carry their own leading spaces.
  std::string prefix;
  for (const auto& t : req.prefix_tokens) prefix += t;
  prefix = text::trim(prefix);
  if (!prefix.empty()) user += " Begin your sentence exactly with: " + prefix;
  auto reply = chat("You caption live-stream events.", user, true);
  CaptionReply out;
  out.text = text::trim(reply.content);
  if (!prefix.empty() && out.text.rfind(prefix, 0) != 0) out.text = prefix + " " + out.text;
  out.scores = std::move(reply.scores);
  return out;
}

std::vector<kea::TokenScore> HttpBackend::caption_trace(const std::string& caption) {
  auto reply = chat("You repeat text verbatim.", "Repeat exactly:\n" + caption, true);
  return reply.scores;
}

bool HttpBackend::judge(const JudgeRequest& req) {
  const std::string user = "Question: " + req.question + "\nReference answer: " + req.gold_answer +
                           "\nCandidate answer: " + req.predicted_answer +
                           "\nIs the candidate answer correct? Reply with yes or no.";
  const auto verdict = text::ascii_lower(text::trim(chat("You grade answers.", user, false).content));
  if (verdict.rfind("yes", 0) == 0) return true;
  if (verdict.rfind("no", 0) == 0) return false;
  fail(ErrorCode::kJudge, "judge reply is neither yes nor no: " + verdict.substr(0, 80));
}

} // namespace streamcart::backend
