#include "streamcart/streamcart.h"

#include "backend/backend.hpp"
#include "backend/mock_backend.hpp"
#include "clickqa/evaluate.hpp"
#include "clickqa/judge.hpp"
#include "common/error.hpp"
#include "datasynth/datasynth.hpp"
#include "kea/kea.hpp"
#include "offline/lexicon.hpp"
#include "offline/pipeline.hpp"
#include "offline/purify.hpp"
#include "offline/record_store.hpp"
#include "service/config.hpp"
#include "service/service.hpp"
#include "service/simulate.hpp"
#include "ses/feature_io.hpp"
#include "ses/ses.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

using namespace streamcart;
using nlohmann::json;

struct sc_ses_stream {
  ses::SesStream stream;
};

struct sc_lexicon {
  offline::Lexicon lexicon;
};

struct sc_record_store {
  offline::RecordStore store;
};

struct sc_service {
  std::unique_ptr<service::Service> service;
};

namespace {

thread_local std::string t_last_error;

sc_status set_error(sc_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

template <typename F>
sc_status guard(F&& f) {
  try {
    f();
    return SC_OK;
  } catch (const Error& e) {
    return set_error(static_cast<sc_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return set_error(SC_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SC_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) fail(ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  require(out, "output pointer");
  *out = dup(s);
}

ses::SesConfig ses_from(const sc_ses_config* c) {
  ses::SesConfig out;
  if (c != nullptr) {
    out.gamma = c->gamma;
    out.alpha = c->alpha;
    out.window_size = c->window_size;
    out.min_segment_len = c->min_segment_len;
    if (c->warmup_frames > 0) out.warmup_frames = c->warmup_frames;
  }
  out.validate();
  return out;
}

kea::KeaConfig kea_from(const sc_kea_config* c) {
  kea::KeaConfig out;
  if (c != nullptr) {
    out.delta = c->delta;
    out.alpha = c->alpha;
    out.beta = c->beta;
  }
  out.validate();
  return out;
}

sc_segment segment_to_c(const ses::EventSegment& s) {
  return {s.start_frame, s.end_frame, s.confirmed_at_frame, s.start_time, s.end_time};
}

json segment_json(const ses::EventSegment& s) {
  return {{"start_frame", s.start_frame}, {"end_frame", s.end_frame},
          {"confirmed_at_frame", s.confirmed_at_frame}, {"start_time", s.start_time},
          {"end_time", s.end_time}, {"frames", s.frame_count()}};
}

json segments_json(const std::vector<ses::EventSegment>& segs) {
  json arr = json::array();
  for (const auto& s : segs) arr.push_back(segment_json(s));
  return arr;
}

json segmentation_json(const ses::OfflineSegmentation& seg, const ses::SesConfig& cfg, bool depths) {
  json boundaries = json::array();
  for (size_t i = 1; i < seg.segments.size(); ++i) boundaries.push_back(seg.segments[i].start_frame);
  json out = {{"config",
               {{"gamma", cfg.gamma},
                {"alpha", cfg.alpha},
                {"window_size", cfg.window_size},
                {"min_segment_len", cfg.min_segment_len},
                {"warmup_frames", cfg.warmup()}}},
              {"frames", seg.depths.size()},
              {"boundaries", boundaries},
              {"segments", segments_json(seg.segments)}};
  if (depths) {
    json arr = json::array();
    for (size_t i = 0; i < seg.depths.size(); ++i) {
      const auto& d = seg.depths[i];
      arr.push_back({{"frame_id", d.frame_id}, {"c_hat", d.c_hat}, {"depth", d.depth},
                     {"left_peak", d.left_peak}, {"right_peak", d.right_peak},
                     {"exceeds_threshold", static_cast<bool>(seg.exceeds_threshold[i])}});
    }
    out["depths"] = arr;
  }
  return out;
}

std::shared_ptr<backend::ModelBackend> backend_from(const char* backend_json) {
  backend::BackendProfile profile;
  if (backend_json != nullptr && *backend_json != '\0') profile = json::parse(backend_json).get<backend::BackendProfile>();
  return backend::make_backend(profile);
}

json truncation_json(const std::vector<kea::TokenScore>& scores, const kea::KeaConfig& cfg,
                     const std::string& caption_id) {
  const auto r = kea::find_truncation(scores, cfg);
  std::vector<std::string> tokens;
  for (const auto& s : scores) tokens.push_back(s.token_text);
  json out = {{"caption_id", caption_id},
              {"length", scores.size()},
              {"delta", cfg.delta},
              {"alpha", cfg.alpha},
              {"beta", cfg.beta},
              {"index", r.index ? json(*r.index) : json(nullptr)},
              {"prefix_len", r.prefix_len},
              {"prefix", kea::build_prefix(tokens, r)}};
  if (r.index) {
    const auto z = *r.index;
    const double mu = kea::trailing_mean(scores, z, cfg.delta);
    out["trailing_mean"] = mu;
    out["threshold"] = kea::dynamic_threshold(mu, cfg.alpha, cfg.beta);
    out["discrepancy"] = mu - scores[z - 1].log_prob;
  }
  return out;
}

} // namespace

extern "C" {

const char* sc_version(void) { return service::kVersion; }

const char* sc_status_name(sc_status status) {
  if (status == SC_OK) return "ok";
  if (status < SC_ERR_INVALID_ARGUMENT || status > SC_ERR_INTERNAL) return "unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* sc_last_error(void) { return t_last_error.c_str(); }

void sc_string_free(char* s) { std::free(s); }

sc_status sc_set_log_level(const char* level) {
  return guard([&] {
    require(level, "level");
    const auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && std::string(level) != "off")
      fail(ErrorCode::kInvalidArgument, std::string("unknown log level '") + level + "'");
    spdlog::set_level(lvl);
  });
}

void sc_ses_config_default(sc_ses_config* config) {
  if (config == nullptr) return;
  const ses::SesConfig d;
  *config = {d.gamma, d.alpha, d.window_size, d.min_segment_len, 0};
}

sc_status sc_ses_fuse_similarity(double c_vit, double m, double gamma, double* out) {
  return guard([&] {
    require(out, "out");
    *out = ses::fuse_similarity(c_vit, m, gamma);
  });
}

sc_status sc_ses_stream_create(const sc_ses_config* config, sc_ses_stream** out) {
  return guard([&] {
    require(out, "out");
    *out = new sc_ses_stream{ses::SesStream(ses_from(config))};
  });
}

void sc_ses_stream_destroy(sc_ses_stream* stream) { delete stream; }

sc_status sc_ses_stream_push(sc_ses_stream* stream, const sc_frame* frame, sc_segment* segment,
                             int* has_segment) {
  return guard([&] {
    require(stream, "stream");
    require(frame, "frame");
    require(has_segment, "has_segment");
    const auto seg = stream->stream.push(
        {frame->frame_id, frame->timestamp, frame->vit_similarity, frame->flow_magnitude});
    *has_segment = seg ? 1 : 0;
    if (seg && segment != nullptr) *segment = segment_to_c(*seg);
  });
}

sc_status sc_ses_stream_flush(sc_ses_stream* stream, char** out) {
  return guard([&] {
    require(stream, "stream");
    put(out, segments_json(stream->stream.flush()).dump());
  });
}

sc_status sc_ses_segment(const sc_frame* frames, size_t count, const sc_ses_config* config,
                         char** result_json) {
  return guard([&] {
    if (count > 0) require(frames, "frames");
    const auto cfg = ses_from(config);
    std::vector<ses::FrameFeature> signal;
    signal.reserve(count);
    for (size_t i = 0; i < count; ++i)
      signal.push_back({frames[i].frame_id, frames[i].timestamp, frames[i].vit_similarity,
                        frames[i].flow_magnitude});
    put(result_json, segmentation_json(ses::segment_offline_detailed(signal, cfg), cfg, false).dump());
  });
}

sc_status sc_ses_segment_file(const char* path, const sc_ses_config* config, int include_depths,
                              char** result_json) {
  return guard([&] {
    require(path, "path");
    const auto cfg = ses_from(config);
    const auto file = ses::read_feature_file(std::string(path));
    auto out = segmentation_json(ses::segment_offline_detailed(file.frames, cfg), cfg, include_depths != 0);
    out["header"] = file.header;
    // The streaming path must agree with the batch result; report both.
    ses::SesStream stream(cfg);
    std::vector<ses::EventSegment> streamed;
    for (const auto& f : file.frames) {
      if (auto seg = stream.push(f)) streamed.push_back(*seg);
    }
    for (const auto& seg : stream.flush()) streamed.push_back(seg);
    out["streaming_matches_offline"] = segments_json(streamed) == out["segments"];
    put(result_json, out.dump());
  });
}

void sc_kea_config_default(sc_kea_config* config) {
  if (config == nullptr) return;
  const kea::KeaConfig d;
  *config = {d.delta, d.alpha, d.beta};
}

sc_status sc_kea_find_truncation(const double* log_probs, size_t count, const sc_kea_config* config,
                                 int64_t* index, size_t* prefix_len) {
  return guard([&] {
    if (count > 0) require(log_probs, "log_probs");
    require(index, "index");
    require(prefix_len, "prefix_len");
    const auto scores = kea::scores_from_log_probs(std::span<const double>(log_probs, count));
    const auto r = kea::find_truncation(scores, kea_from(config));
    *index = r.index ? static_cast<int64_t>(*r.index) : 0;
    *prefix_len = r.prefix_len;
  });
}

sc_status sc_kea_truncate_file(const char* path, const sc_kea_config* config, char** result_json) {
  return guard([&] {
    require(path, "path");
    const auto trace = kea::read_trace_file(std::string(path));
    put(result_json, truncation_json(trace.scores, kea_from(config), trace.caption_id).dump());
  });
}

sc_status sc_reward(const char* q_hat, const char* a_hat, const char* q_star, const char* a_star,
                    const char* judge, double* reward) {
  return guard([&] {
    require(q_hat, "q_hat");
    require(a_hat, "a_hat");
    require(q_star, "q_star");
    require(a_star, "a_star");
    require(reward, "reward");
    const auto kind = clickqa::parse_judge_kind(judge == nullptr ? "exact" : judge);
    std::unique_ptr<clickqa::Judge> j;
    if (kind == clickqa::JudgeKind::kExact) {
      j = std::make_unique<clickqa::ExactJudge>();
    } else if (kind == clickqa::JudgeKind::kLenient) {
      j = std::make_unique<clickqa::LenientJudge>();
    } else {
      fail(ErrorCode::kInvalidArgument, "sc_reward supports the exact and lenient judges");
    }
    *reward = clickqa::reward(q_hat, a_hat, q_star, a_star, *j);
  });
}

sc_status sc_clickqa_resolve(const char* overlay_json, int64_t frame_id, int x, int y, double radius,
                             char** message_json) {
  return guard([&] {
    require(overlay_json, "overlay_json");
    const auto overlay = json::parse(overlay_json).get<clickqa::FrameOverlay>();
    overlay.validate();
    if (frame_id != overlay.frame_id)
      fail(ErrorCode::kValidation, "click frame_id does not match the overlay");
    if (x < 0 || y < 0 || x >= overlay.width || y >= overlay.height)
      fail(ErrorCode::kValidation, "click lies outside the frame");
    put(message_json, json(clickqa::resolve_click(overlay, {frame_id, x, y}, radius)).dump());
  });
}

sc_status sc_clickqa_evaluate(const char* manifest_path, const char* options_json, char** metrics_json) {
  return guard([&] {
    require(manifest_path, "manifest_path");
    const json opts = (options_json != nullptr && *options_json) ? json::parse(options_json) : json::object();
    backend::BackendProfile profile;
    if (opts.contains("backend")) profile = opts["backend"].get<backend::BackendProfile>();
    auto be = backend::make_backend(profile);
    const auto dataset = clickqa::read_dataset(manifest_path);
    if (auto* mock = dynamic_cast<backend::MockBackend*>(be.get()); mock && opts.value("prime_mock", true))
      clickqa::prime_mock(*mock, dataset.samples);
    std::unique_ptr<clickqa::Judge> judge;
    switch (clickqa::parse_judge_kind(opts.value("judge", std::string("exact")))) {
    case clickqa::JudgeKind::kExact: judge = std::make_unique<clickqa::ExactJudge>(); break;
    case clickqa::JudgeKind::kLenient: judge = std::make_unique<clickqa::LenientJudge>(); break;
    case clickqa::JudgeKind::kExternal: judge = std::make_unique<clickqa::ExternalJudge>(be); break;
    }
    offline::ProductRecord record;
    if (opts.contains("record")) {
      record = opts["record"].get<offline::ProductRecord>();
    } else {
      record.product_id = "evaluation";
      record.name = "evaluation product";
    }
    const auto m = clickqa::evaluate_dataset(dataset.samples, *be, *judge, record);
    auto out = clickqa::metrics_json(m);
    out["dataset"] = {{"manifest", manifest_path}, {"seed", dataset.header.seed},
                      {"images", dataset.header.images}, {"samples", dataset.samples.size()}};
    out["backend"] = profile;
    out["judge"] = opts.value("judge", std::string("exact"));
    put(metrics_json, out.dump());
  });
}

sc_status sc_datasynth_generate(const char* pool_path, const char* out_dir, const char* config_json,
                                char** summary_json) {
  return guard([&] {
    require(pool_path, "pool_path");
    require(out_dir, "out_dir");
    const json c = (config_json != nullptr && *config_json) ? json::parse(config_json) : json::object();
    datasynth::SynthConfig cfg;
    cfg.num_images = c.value("images", cfg.num_images);
    cfg.questions_per_image = c.value("per_image", cfg.questions_per_image);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.frame_width = c.value("frame_width", cfg.frame_width);
    cfg.frame_height = c.value("frame_height", cfg.frame_height);
    cfg.font_box_height = c.value("font_box_height", cfg.font_box_height);
    cfg.padding = c.value("padding", cfg.padding);
    const auto format = c.value("pool_format", std::string("jsonl"));
    std::vector<datasynth::QAItem> pool;
    if (format == "jsonl") {
      pool = datasynth::read_qa_pool(pool_path);
    } else if (format == "clevr") {
      pool = datasynth::read_clevr_questions(pool_path);
    } else {
      fail(ErrorCode::kValidation, "pool_format must be jsonl or clevr");
    }
    const auto samples = datasynth::generate_dataset(pool, cfg);
    datasynth::write_dataset(out_dir, samples, cfg);
    put(summary_json, json{{"manifest", std::string(out_dir) + "/manifest.jsonl"},
                           {"images", cfg.num_images},
                           {"per_image", cfg.questions_per_image},
                           {"samples", samples.size()},
                           {"seed", cfg.seed},
                           {"pool_size", pool.size()}}
                          .dump());
  });
}

sc_status sc_lexicon_load(const char* path, sc_lexicon** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new sc_lexicon{offline::read_lexicon_file(path)};
  });
}

void sc_lexicon_destroy(sc_lexicon* lexicon) { delete lexicon; }

sc_status sc_detect_prohibited(const sc_lexicon* lexicon, const char* text, char** matches_json) {
  return guard([&] {
    require(lexicon, "lexicon");
    require(text, "text");
    json arr = json::array();
    const std::string t(text);
    for (const auto& m : offline::detect_prohibited(t, lexicon->lexicon)) {
      const auto& e = lexicon->lexicon.entries()[m.entry];
      arr.push_back({{"pattern", e.pattern}, {"text", t.substr(m.begin, m.end - m.begin)},
                     {"span", {m.begin, m.end}}, {"action", offline::action_name(e.action)},
                     {"category", e.category}});
    }
    put(matches_json, arr.dump());
  });
}

sc_status sc_purify(const sc_lexicon* lexicon, const char* text, const char* backend_json, char** result_json) {
  return guard([&] {
    require(lexicon, "lexicon");
    require(text, "text");
    std::shared_ptr<backend::ModelBackend> be;
    if (backend_json != nullptr) be = backend_from(backend_json);
    const auto r = offline::purify(text, lexicon->lexicon, be.get());
    put(result_json, json{{"text", r.text}, {"report", r.report}}.dump());
  });
}

sc_status sc_offline_integrate(const char* request_json, const char* backend_json, char** record_json) {
  return guard([&] {
    require(request_json, "request_json");
    const auto req = json::parse(request_json);
    std::vector<offline::RawMaterial> materials;
    for (const auto& m : req.value("materials", json::array())) {
      materials.push_back({offline::parse_source_kind(m.value("source_kind", "text")),
                           m.at("content").get<std::string>(), offline::parse_origin(m.value("origin", "user"))});
    }
    auto be = backend_from(backend_json);
    const auto record = offline::integrate(req.at("product_id").get<std::string>(), materials,
                                           req.value("external_snippets", std::vector<std::string>{}), *be);
    put(record_json, json(record).dump());
  });
}

sc_status sc_offline_copy(const char* record_json, const char* style, const char* exemplar,
                          const char* backend_json, char** copy_json) {
  return guard([&] {
    require(record_json, "record_json");
    if ((style == nullptr) == (exemplar == nullptr))
      fail(ErrorCode::kInvalidArgument, "pass exactly one of style and exemplar");
    const auto record = json::parse(record_json).get<offline::ProductRecord>();
    auto be = backend_from(backend_json);
    const auto copy = exemplar != nullptr ? offline::adapt_style(record, exemplar, *be)
                                          : offline::generate_copy(record, std::string_view(style), *be);
    put(copy_json, json{{"product_id", copy.product_id},
                        {"style", offline::style_name(copy.style)},
                        {"body", copy.body},
                        {"interaction_phrases", copy.interaction_phrases}}
                       .dump());
  });
}

sc_status sc_record_store_open(const char* dir, sc_record_store** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new sc_record_store{offline::RecordStore(dir)};
  });
}

void sc_record_store_close(sc_record_store* store) { delete store; }

sc_status sc_record_save(sc_record_store* store, const char* record_json) {
  return guard([&] {
    require(store, "store");
    require(record_json, "record_json");
    store->store.save(json::parse(record_json).get<offline::ProductRecord>());
  });
}

sc_status sc_record_load(sc_record_store* store, const char* product_id, char** record_json) {
  return guard([&] {
    require(store, "store");
    require(product_id, "product_id");
    put(record_json, json(store->store.load(product_id)).dump());
  });
}

sc_status sc_service_create(const char* config_path, const char* overrides_json, sc_service** out) {
  return guard([&] {
    require(out, "out");
    std::optional<std::string> path;
    if (config_path != nullptr) path = config_path;
    json overrides;
    if (overrides_json != nullptr && *overrides_json) overrides = json::parse(overrides_json);
    auto cfg = service::load_config(path, overrides, service::process_env());
    *out = new sc_service{std::make_unique<service::Service>(std::move(cfg))};
  });
}

sc_status sc_service_start(sc_service* svc, int* port) {
  return guard([&] {
    require(svc, "service");
    svc->service->start();
    if (port != nullptr) *port = svc->service->port();
  });
}

sc_status sc_service_run(sc_service* svc) {
  return guard([&] {
    require(svc, "service");
    svc->service->run();
  });
}

void sc_service_stop(sc_service* svc) {
  if (svc != nullptr) svc->service->stop();
}

void sc_service_destroy(sc_service* svc) { delete svc; }

sc_status sc_simulate(const char* scenario_path, int64_t seed, char** transcript, char** metrics_json) {
  return guard([&] {
    require(scenario_path, "scenario_path");
    service::SimulationOptions opts;
    if (seed >= 0) opts.seed = static_cast<uint64_t>(seed);
    const auto result = service::run_simulation(scenario_path, opts);
    if (transcript != nullptr) *transcript = dup(result.transcript());
    if (metrics_json != nullptr) *metrics_json = dup(service::metrics_json(result.metrics).dump());
  });
}

} // extern "C"
