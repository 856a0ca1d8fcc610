#pragma once

#include "clickqa/retrieval.hpp"
#include "common/error.hpp"
#include "offline/lexicon.hpp"
#include "offline/record_store.hpp"
#include "service/config.hpp"
#include "service/session.hpp"

#include <nlohmann/json_fwd.hpp>

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace streamcart::service {

// Maps an engine error code to the HTTP status the service answers with.
int http_status_for(ErrorCode code);

class Service {
public:
  explicit Service(ServiceConfig config, std::shared_ptr<backend::ModelBackend> backend = nullptr);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Throws kIo when the port is
  // unavailable. With port 0 an ephemeral port is chosen; see port().
  void start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const { return bound_port_; }

  const ServiceConfig& config() const { return config_; }
  backend::ModelBackend& backend() { return *backend_; }
  offline::RecordStore& records() { return *records_; }
  std::shared_ptr<Session> session(const std::string& id) const;

private:
  void bind();
  void routes();

  ServiceConfig config_;
  std::shared_ptr<backend::ModelBackend> backend_;
  std::unique_ptr<offline::RecordStore> records_;
  offline::Lexicon lexicon_;
  std::unique_ptr<clickqa::FixtureRetriever> retriever_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int bound_port_ = 0;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<uint64_t> next_session_{1};
};

} // namespace streamcart::service
