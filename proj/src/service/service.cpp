#include "service/service.hpp"

#include "backend/mock_backend.hpp"
#include "clickqa/pipeline.hpp"
#include "common/error.hpp"
#include "common/instrument.hpp"
#include "offline/pipeline.hpp"
#include "offline/purify.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>

namespace streamcart::service {

using nlohmann::json;

int http_status_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::kInvalidArgument:
  case ErrorCode::kValidation:
  case ErrorCode::kParse:
  case ErrorCode::kLayout:
  case ErrorCode::kPrecondition: return 400;
  case ErrorCode::kNotFound: return 404;
  case ErrorCode::kNoMessage:
  case ErrorCode::kIntegration: return 422;
  case ErrorCode::kTransport:
  case ErrorCode::kExtraction:
  case ErrorCode::kJudge: return 502;
  default: return 500;
  }
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  reply(res, http_status_for(code), {{"error", error_code_name(code)}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto doc = json::parse(req.body);
    if (!doc.is_object()) fail(ErrorCode::kValidation, "request body must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("request body is not JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      reply_error(res, ErrorCode::kValidation, e.what());
    } catch (const std::logic_error& e) {
      reply_error(res, ErrorCode::kValidation, e.what());
    } catch (const std::exception& e) {
      reply_error(res, ErrorCode::kInternal, e.what());
    }
  };
}

ses::FrameFeature feature_from_json(const json& j) {
  return {j.at("frame_id").get<int64_t>(), j.at("timestamp").get<double>(),
          j.at("vit_similarity").get<double>(), j.at("flow_magnitude").get<double>()};
}

void merge_report(offline::PurificationReport& into, const offline::PurificationReport& r) {
  into.count_before += r.count_before;
  into.count_after += r.count_after;
  into.rewritten = into.rewritten || r.rewritten;
  into.matches.insert(into.matches.end(), r.matches.begin(), r.matches.end());
}

} // namespace

Service::Service(ServiceConfig config, std::shared_ptr<backend::ModelBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {
  config_.validate();
  if (!backend_) backend_ = backend::make_backend(config_.backend);
  records_ = std::make_unique<offline::RecordStore>(config_.storage_path);
  if (!config_.lexicon_path.empty()) lexicon_ = offline::read_lexicon_file(config_.lexicon_path);
  if (!config_.retrieval_corpus_path.empty()) {
    retriever_ = std::make_unique<clickqa::FixtureRetriever>(
        clickqa::FixtureRetriever::from_file(config_.retrieval_corpus_path));
  }
  server_ = std::make_unique<httplib::Server>();
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  server_->set_tcp_nodelay(true);
  const int threads = config_.threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<size_t>(threads)); };
  server_->set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {} ({} bytes)", req.method, req.path, res.status, res.body.size());
  });
  routes();
}

Service::~Service() { stop(); }

std::shared_ptr<Session> Service::session(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorCode::kNotFound, "session '" + id + "' not found");
  return it->second;
}

void Service::bind() {
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (bound_port_ <= 0) {
    fail(ErrorCode::kIo, "cannot listen on " + config_.host + ":" + std::to_string(config_.port) +
                             " (port busy or address unavailable)");
  }
  spdlog::info("streamcart {} listening on {}:{} (backend {})", kVersion, config_.host, bound_port_,
               backend_->name());
}

void Service::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::run() {
  bind();
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  std::unique_lock lock(sessions_mu_);
  sessions_.clear();
}

void Service::routes() {
  auto& s = *server_;

  s.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}, {"version", kVersion}, {"backend", backend_->name()}});
  }));

  s.Get("/stats", guarded([](const httplib::Request&, httplib::Response& res) {
    const auto c = instrument::counters();
    reply(res, 200,
          {{"segmentation_total", c.segmentation_total},
           {"caption_total", c.caption_total},
           {"segmentation_on_request_path", c.segmentation_on_request_path},
           {"caption_on_request_path", c.caption_on_request_path}});
  }));

  s.Post("/products", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    const auto body = parse_body(req);
    offline::ProductRecord record;
    if (body.contains("record")) {
      record = body["record"].get<offline::ProductRecord>();
    } else {
      const auto id = body.at("product_id").get<std::string>();
      std::vector<offline::RawMaterial> materials;
      for (const auto& m : body.value("materials", json::array())) {
        materials.push_back({offline::parse_source_kind(m.value("source_kind", "text")),
                             m.at("content").get<std::string>(),
                             offline::parse_origin(m.value("origin", "user"))});
      }
      record = offline::integrate(id, materials, body.value("external_snippets", std::vector<std::string>{}),
                                  *backend_);
    }
    records_->save(record);
    reply(res, 201, record);
  }));

  s.Get(R"(/products/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, records_->load(req.matches[1]));
  }));

  s.Post("/copy", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    const auto body = parse_body(req);
    const auto record = records_->load(body.at("product_id").get<std::string>());
    offline::Copy copy = body.contains("exemplar")
                             ? offline::adapt_style(record, body["exemplar"].get<std::string>(), *backend_)
                             : offline::generate_copy(record, body.value("style", "general"), *backend_);
    offline::PurificationReport report;
    auto purified = offline::purify(copy.body, lexicon_);
    copy.body = purified.text;
    report = purified.report;
    for (auto& phrase : copy.interaction_phrases) {
      auto p = offline::purify(phrase, lexicon_);
      phrase = p.text;
      merge_report(report, p.report);
    }
    reply(res, 200,
          {{"product_id", copy.product_id},
           {"style", offline::style_name(copy.style)},
           {"body", copy.body},
           {"interaction_phrases", copy.interaction_phrases},
           {"purification", report}});
  }));

  s.Post("/purify", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    const auto body = parse_body(req);
    const auto result = offline::purify(body.at("text").get<std::string>(), lexicon_,
                                        body.value("use_backend", false) ? backend_.get() : nullptr);
    reply(res, 200, {{"text", result.text}, {"report", result.report}});
  }));

  s.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto product = body.at("product_id").get<std::string>();
    std::string id = body.value("session_id", std::string{});
    if (id.empty()) id = "s" + std::to_string(next_session_.fetch_add(1));
    std::unique_lock lock(sessions_mu_);
    if (sessions_.count(id)) fail(ErrorCode::kValidation, "session '" + id + "' already exists");
    sessions_[id] = std::make_shared<Session>(id, product, config_.ses, config_.kea, backend_);
    reply(res, 201, {{"session_id", id}, {"product_id", product}});
  }));

  s.Post(R"(/sessions/([^/]+)/frames)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    auto sess = session(req.matches[1]);
    const auto body = parse_body(req);
    std::vector<ses::FrameFeature> frames;
    for (const auto& f : body.value("frames", json::array())) frames.push_back(feature_from_json(f));
    sess->enqueue(frames, body.value("flush", false));
    reply(res, 202, {{"accepted", frames.size()}, {"queued", sess->stats().queued}});
  }));

  s.Post(R"(/sessions/([^/]+)/overlays)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto sess = session(req.matches[1]);
    const auto overlay = parse_body(req).get<clickqa::FrameOverlay>();
    sess->put_overlay(overlay);
    if (auto* mock = dynamic_cast<backend::MockBackend*>(backend_.get())) mock->register_overlay(overlay);
    reply(res, 201, {{"frame_id", overlay.frame_id}, {"messages", overlay.messages.size()}});
  }));

  s.Get(R"(/sessions/([^/]+)/overlays/latest)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto sess = session(req.matches[1]);
    const auto overlay = sess->latest_overlay();
    if (!overlay) fail(ErrorCode::kNotFound, "session has no overlay yet");
    reply(res, 200, *overlay);
  }));

  s.Post(R"(/sessions/([^/]+)/click)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    const auto t0 = std::chrono::steady_clock::now();
    auto sess = session(req.matches[1]);
    const auto body = parse_body(req);
    const auto product_id = body.value("product_id", sess->product_id());
    const auto record = records_->load(product_id);
    const clickqa::ClickEvent click{body.at("frame_id").get<int64_t>(), body.at("x").get<int>(),
                                    body.at("y").get<int>()};
    const auto overlay = sess->overlay(click.frame_id);
    if (!overlay) fail(ErrorCode::kNotFound, "no overlay for frame " + std::to_string(click.frame_id));
    if (click.x < 0 || click.y < 0 || click.x >= overlay->width || click.y >= overlay->height)
      fail(ErrorCode::kValidation, "click lies outside the frame");
    const auto& message = clickqa::resolve_click(*overlay, click, config_.click_radius);
    const auto frame = sess->frame_image(click.frame_id);
    const auto context = sess->memory().recent(config_.recent_k);
    clickqa::ClickOptions options{config_.recent_k, &lexicon_, retriever_.get()};
    const auto r = clickqa::respond_to_click(*backend_, *frame, click, record, context, options);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    reply(res, 200,
          {{"question", r.question},
           {"answer", r.answer},
           {"message_id", message.message_id},
           {"retrieved", r.supplementary.has_value()},
           {"purification", r.purification},
           {"latency_ms", ms}});
  }));

  s.Get(R"(/sessions/([^/]+)/memory)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    instrument::RequestPathScope scope;
    auto sess = session(req.matches[1]);
    auto& mem = sess->memory();
    std::vector<memory::MemoryEntry> entries;
    const auto snap = mem.snapshot();
    if (req.has_param("t0") || req.has_param("t1")) {
      const double t0 = req.has_param("t0") ? std::stod(req.get_param_value("t0")) : 0.0;
      const double t1 = req.has_param("t1") ? std::stod(req.get_param_value("t1")) : 1e300;
      entries = mem.range(t0, t1);
    } else if (req.has_param("k")) {
      entries = memory::recent_of(*snap.entries, std::stoul(req.get_param_value("k")));
    } else {
      entries = *snap.entries;
    }
    const auto st = sess->stats();
    reply(res, 200,
          {{"session_id", sess->id()},
           {"version", snap.version},
           {"entries", entries},
           {"stats",
            {{"frames_received", st.frames_received},
             {"frames_processed", st.frames_processed},
             {"segments", st.segments},
             {"prefix_reused", st.prefix_reused},
             {"caption_failures", st.caption_failures},
             {"queued", st.queued}}}});
  }));
}

} // namespace streamcart::service
