#pragma once

#include "backend/backend.hpp"
#include "kea/kea.hpp"
#include "ses/ses.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>

namespace streamcart::service {

inline constexpr const char* kVersion = "0.1.0";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string storage_path = "streamcart-data";
  std::string lexicon_path;           // empty: no prohibited terms
  std::string retrieval_corpus_path;  // empty: no supplementary retrieval
  int threads = 8;
  backend::BackendProfile backend;
  ses::SesConfig ses;
  kea::KeaConfig kea;
  double click_radius = clickqa::kDefaultClickRadius;
  size_t recent_k = 5;

  void validate() const;
};

// Layers, lowest first: built-in defaults, the JSON config file, the
// environment, then explicit overrides (same shape as the file). The
// environment variables are
//   STREAMCART_HOST, STREAMCART_PORT, STREAMCART_STORAGE, STREAMCART_LEXICON,
//   STREAMCART_RETRIEVAL, STREAMCART_BACKEND (mock|http),
//   STREAMCART_BACKEND_ENDPOINT, STREAMCART_BACKEND_MODEL, STREAMCART_SEED.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;

ServiceConfig load_config(const std::optional<std::string>& file, const nlohmann::json& overrides = {},
                          const EnvLookup& env = {});

ServiceConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ServiceConfig& config);

ses::SesConfig ses_config_from_json(const nlohmann::json& j, ses::SesConfig base = {});
kea::KeaConfig kea_config_from_json(const nlohmann::json& j, kea::KeaConfig base = {});

EnvLookup process_env();

} // namespace streamcart::service
