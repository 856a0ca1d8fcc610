#include "service/config.hpp"

#include "common/error.hpp"

#include <cstdlib>
#include <fstream>

namespace streamcart::service {

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) fail(ErrorCode::kValidation, "port must lie in [0, 65535]");
  if (threads < 1) fail(ErrorCode::kValidation, "threads must be >= 1");
  if (storage_path.empty()) fail(ErrorCode::kValidation, "storage_path must be set");
  if (!(click_radius >= 0.0)) fail(ErrorCode::kValidation, "click.radius must be >= 0");
  backend.validate();
  ses.validate();
  kea.validate();
}

ses::SesConfig ses_config_from_json(const nlohmann::json& j, ses::SesConfig c) {
  if (j.is_null()) return c;
  c.gamma = j.value("gamma", c.gamma);
  c.alpha = j.value("alpha", c.alpha);
  c.window_size = j.value("window_size", c.window_size);
  c.min_segment_len = j.value("min_segment_len", c.min_segment_len);
  if (j.contains("warmup_frames") && !j["warmup_frames"].is_null())
    c.warmup_frames = j["warmup_frames"].get<int>();
  c.validate();
  return c;
}

kea::KeaConfig kea_config_from_json(const nlohmann::json& j, kea::KeaConfig c) {
  if (j.is_null()) return c;
  c.delta = j.value("delta", c.delta);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ServiceConfig& c) {
  nlohmann::json ses = {{"gamma", c.ses.gamma},
                        {"alpha", c.ses.alpha},
                        {"window_size", c.ses.window_size},
                        {"min_segment_len", c.ses.min_segment_len}};
  if (c.ses.warmup_frames) ses["warmup_frames"] = *c.ses.warmup_frames;
  return {{"host", c.host},
          {"port", c.port},
          {"storage_path", c.storage_path},
          {"lexicon", c.lexicon_path},
          {"retrieval_corpus", c.retrieval_corpus_path},
          {"threads", c.threads},
          {"backend", c.backend},
          {"ses", ses},
          {"kea", {{"delta", c.kea.delta}, {"alpha", c.kea.alpha}, {"beta", c.kea.beta}}},
          {"click", {{"radius", c.click_radius}, {"recent_k", c.recent_k}}}};
}

ServiceConfig config_from_json(const nlohmann::json& doc) {
  try {
    ServiceConfig c;
    c.host = doc.value("host", c.host);
    c.port = doc.value("port", c.port);
    c.storage_path = doc.value("storage_path", c.storage_path);
    c.lexicon_path = doc.value("lexicon", c.lexicon_path);
    c.retrieval_corpus_path = doc.value("retrieval_corpus", c.retrieval_corpus_path);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("backend")) c.backend = doc["backend"].get<backend::BackendProfile>();
    c.ses = ses_config_from_json(doc.value("ses", nlohmann::json()), c.ses);
    c.kea = kea_config_from_json(doc.value("kea", nlohmann::json()), c.kea);
    if (doc.contains("click")) {
      c.click_radius = doc["click"].value("radius", c.click_radius);
      c.recent_k = doc["click"].value("recent_k", c.recent_k);
    }
    c.backend.click_radius = c.click_radius;
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation, std::string("bad config: ") + e.what());
  }
}

EnvLookup process_env() {
  return [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

ServiceConfig load_config(const std::optional<std::string>& file, const nlohmann::json& overrides,
                          const EnvLookup& env) {
  nlohmann::json doc = config_to_json(ServiceConfig{});
  if (file) {
    std::ifstream in(*file);
    if (!in) fail(ErrorCode::kIo, "cannot open config file: " + *file);
    try {
      doc.merge_patch(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, *file + ": " + e.what());
    }
  }
  if (env) {
    const auto set = [&](const char* name, const nlohmann::json::json_pointer& ptr, bool numeric) {
      const auto v = env(name);
      if (!v) return;
      if (!numeric) {
        doc[ptr] = *v;
        return;
      }
      try {
        doc[ptr] = std::stoll(*v);
      } catch (const std::exception&) {
        fail(ErrorCode::kValidation, std::string(name) + " must be an integer");
      }
    };
    using ptr = nlohmann::json::json_pointer;
    set("STREAMCART_HOST", ptr("/host"), false);
    set("STREAMCART_PORT", ptr("/port"), true);
    set("STREAMCART_STORAGE", ptr("/storage_path"), false);
    set("STREAMCART_LEXICON", ptr("/lexicon"), false);
    set("STREAMCART_RETRIEVAL", ptr("/retrieval_corpus"), false);
    set("STREAMCART_BACKEND", ptr("/backend/kind"), false);
    set("STREAMCART_BACKEND_ENDPOINT", ptr("/backend/endpoint"), false);
    set("STREAMCART_BACKEND_MODEL", ptr("/backend/model"), false);
    set("STREAMCART_SEED", ptr("/backend/seed"), true);
  }
  if (!overrides.is_null()) doc.merge_patch(overrides);
  return config_from_json(doc);
}

} // namespace streamcart::service
