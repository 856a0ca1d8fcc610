#include "streamcart/streamcart.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct Failure {
  sc_status status;
};

void check(sc_status s) {
  if (s != SC_OK) {
    std::cerr << "error (" << sc_status_name(s) << "): " << sc_last_error() << "\n";
    throw Failure{s};
  }
}

// Owns a string returned through the C API.
struct Owned {
  char* p = nullptr;
  ~Owned() { sc_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error (io): cannot read " << path << "\n";
    throw Failure{SC_ERR_IO};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& doc, const std::string& out_path) {
  const auto text = json::parse(doc).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out_path) << text;
    std::cerr << "wrote " << out_path << "\n";
  }
}

std::optional<std::string> backend_profile(const std::string& kind, const std::string& file) {
  if (!file.empty()) return slurp(file);
  if (kind == "mock") return std::nullopt;
  if (kind.rfind("http://", 0) == 0) return json{{"kind", "http"}, {"endpoint", kind}}.dump();
  std::cerr << "error (invalid_argument): --backend takes 'mock' or an http:// endpoint\n";
  throw Failure{SC_ERR_INVALID_ARGUMENT};
}

const char* cstr(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

sc_service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) sc_service_stop(g_service);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Live-commerce assistant engine"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");
  app.set_version_flag("--version", std::string(sc_version()));

  // ses segment
  auto* ses = app.add_subcommand("ses", "Streaming event segmentation");
  ses->require_subcommand(1);
  auto* seg = ses->add_subcommand("segment", "Segment a feature stream file");
  sc_ses_config scfg;
  sc_ses_config_default(&scfg);
  std::string seg_input, seg_out;
  bool emit_json = false, depths = false;
  seg->add_option("--input", seg_input, "Feature stream file")->required();
  seg->add_option("--gamma", scfg.gamma, "Weight of the ViT similarity")->capture_default_str();
  seg->add_option("--alpha", scfg.alpha, "Threshold multiplier")->capture_default_str();
  seg->add_option("--window", scfg.window_size, "Sliding window W")->capture_default_str();
  seg->add_option("--min-len", scfg.min_segment_len, "Minimum segment length")->capture_default_str();
  seg->add_option("--warmup", scfg.warmup_frames, "Warmup frames (<=0: window)");
  seg->add_flag("--emit-json", emit_json, "Print the full JSON result");
  seg->add_flag("--depths", depths, "Include per-frame depth samples");
  seg->add_option("--out", seg_out, "Write the JSON result here");

  // kea truncate
  auto* kea = app.add_subcommand("kea", "Caption prefix truncation");
  kea->require_subcommand(1);
  auto* trunc = kea->add_subcommand("truncate", "Find the truncation point of a token trace");
  sc_kea_config kcfg;
  sc_kea_config_default(&kcfg);
  std::string trace_path;
  trunc->add_option("--trace", trace_path, "Token trace file")->required();
  trunc->add_option("--delta", kcfg.delta, "Trailing window")->capture_default_str();
  trunc->add_option("--alpha", kcfg.alpha, "Threshold scale")->capture_default_str();
  trunc->add_option("--beta", kcfg.beta, "Threshold offset")->capture_default_str();

  // clickqa evaluate
  auto* cq = app.add_subcommand("clickqa", "Click-based question answering");
  cq->require_subcommand(1);
  auto* eval = cq->add_subcommand("evaluate", "Compute QRA and RQ over a labeled dataset");
  std::string ds_path, eval_backend = "mock", eval_backend_file, judge = "exact", record_path, eval_out;
  bool no_prime = false;
  eval->add_option("--dataset", ds_path, "Dataset manifest")->required();
  eval->add_option("--backend", eval_backend, "mock or an http:// endpoint")->capture_default_str();
  eval->add_option("--backend-config", eval_backend_file, "Backend profile JSON");
  eval->add_option("--judge", judge, "exact|lenient|external")->capture_default_str();
  eval->add_option("--record", record_path, "Product record JSON used as answer context");
  eval->add_flag("--no-prime", no_prime, "Do not register gold answers with the mock backend");
  eval->add_option("--out", eval_out, "Write metrics JSON here");

  // datasynth generate
  auto* ds = app.add_subcommand("datasynth", "Training data synthesis");
  ds->require_subcommand(1);
  auto* gen = ds->add_subcommand("generate", "Embed questions into frames and sample clicks");
  std::string pool, out_dir, pool_format = "jsonl";
  int images = 8000, per_image = 4, frame_w = 720, frame_h = 1280;
  uint64_t seed = 42;
  gen->add_option("--pool", pool, "QA pool file")->required();
  gen->add_option("--images", images)->capture_default_str();
  gen->add_option("--per-image", per_image)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--pool-format", pool_format, "jsonl|clevr")->capture_default_str();
  gen->add_option("--frame-width", frame_w)->capture_default_str();
  gen->add_option("--frame-height", frame_h)->capture_default_str();

  // offline
  auto* off = app.add_subcommand("offline", "Offline preparation pipeline");
  off->require_subcommand(1);
  std::string off_backend = "mock", off_backend_file;
  auto add_backend = [&](CLI::App* c) {
    c->add_option("--backend", off_backend, "mock or an http:// endpoint")->capture_default_str();
    c->add_option("--backend-config", off_backend_file, "Backend profile JSON");
  };
  auto* integ = off->add_subcommand("integrate", "Build a product record from materials");
  std::string req_path, product_id, store_dir, integ_out;
  std::vector<std::string> text_files, doc_files, transcript_files, image_refs, externals;
  integ->add_option("--request", req_path, "Request JSON (product_id, materials, external_snippets)");
  integ->add_option("--product-id", product_id);
  integ->add_option("--text", text_files, "User text material file");
  integ->add_option("--document", doc_files, "Pre-extracted document text file");
  integ->add_option("--transcript", transcript_files, "Transcript file");
  integ->add_option("--image", image_refs, "Image reference");
  integ->add_option("--external", externals, "External retrieval snippet file");
  integ->add_option("--store", store_dir, "Save the record into this record store");
  integ->add_option("--out", integ_out, "Write the record JSON here");
  add_backend(integ);

  auto* copy = off->add_subcommand("copy", "Generate promotional copy");
  std::string copy_record, copy_store, copy_product, style, exemplar, copy_lexicon;
  copy->add_option("--record", copy_record, "Product record JSON");
  copy->add_option("--store", copy_store, "Record store directory");
  copy->add_option("--product-id", copy_product, "Product to load from --store");
  auto* style_opt = copy->add_option("--style", style, "general|literary|humorous|...");
  copy->add_option("--exemplar", exemplar, "Exemplar text file to imitate")->excludes(style_opt);
  copy->add_option("--lexicon", copy_lexicon, "Purify the copy with this lexicon");
  add_backend(copy);

  auto* pur = off->add_subcommand("purify", "Remove prohibited terms");
  std::string lexicon_path, pur_input, pur_text;
  bool use_backend = false;
  pur->add_option("--lexicon", lexicon_path, "Lexicon file")->required();
  pur->add_option("--input", pur_input, "Text file, '-' for stdin");
  pur->add_option("--text", pur_text, "Inline text");
  pur->add_flag("--rewrite", use_backend, "Ask the backend to rewrite before the lexicon pass");
  add_backend(pur);

  // serve / simulate
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string cfg_path, host, storage;
  int port = -1;
  serve->add_option("--config", cfg_path, "Service config JSON");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--storage", storage, "Record store directory");

  auto* sim = app.add_subcommand("simulate", "Replay a scenario deterministically");
  std::string scenario, transcript_out, metrics_out;
  int64_t sim_seed = -1;
  sim->add_option("--scenario", scenario, "Scenario file")->required();
  sim->add_option("--seed", sim_seed, "Override the scenario seed");
  sim->add_option("--transcript", transcript_out, "Write the transcript here (default stdout)");
  sim->add_option("--metrics", metrics_out, "Write metrics JSON here (default stderr)");

  CLI11_PARSE(app, argc, argv);

  try {
    check(sc_set_log_level(log_level.c_str()));

    if (seg->parsed()) {
      Owned r;
      check(sc_ses_segment_file(seg_input.c_str(), &scfg, depths ? 1 : 0, &r.p));
      if (emit_json || !seg_out.empty()) {
        emit(r.str(), seg_out);
      } else {
        const auto doc = json::parse(r.str());
        for (const auto& s : doc["segments"]) {
          std::cout << s["start_frame"] << "\t" << s["end_frame"] << "\t" << s["start_time"] << "\t"
                    << s["end_time"] << "\n";
        }
      }
    } else if (trunc->parsed()) {
      Owned r;
      check(sc_kea_truncate_file(trace_path.c_str(), &kcfg, &r.p));
      emit(r.str(), "");
    } else if (eval->parsed()) {
      json opts = {{"judge", judge}, {"prime_mock", !no_prime}};
      if (auto b = backend_profile(eval_backend, eval_backend_file)) opts["backend"] = json::parse(*b);
      if (!record_path.empty()) opts["record"] = json::parse(slurp(record_path));
      Owned r;
      check(sc_clickqa_evaluate(ds_path.c_str(), opts.dump().c_str(), &r.p));
      emit(r.str(), eval_out);
    } else if (gen->parsed()) {
      const json cfg = {{"images", images},        {"per_image", per_image},   {"seed", seed},
                        {"frame_width", frame_w},  {"frame_height", frame_h}, {"pool_format", pool_format}};
      Owned r;
      check(sc_datasynth_generate(pool.c_str(), out_dir.c_str(), cfg.dump().c_str(), &r.p));
      emit(r.str(), "");
    } else if (integ->parsed()) {
      json req;
      if (!req_path.empty()) {
        req = json::parse(slurp(req_path));
      } else {
        req = {{"product_id", product_id}, {"materials", json::array()}, {"external_snippets", json::array()}};
        auto add = [&](const std::vector<std::string>& files, const char* kind) {
          for (const auto& f : files)
            req["materials"].push_back({{"source_kind", kind}, {"content", slurp(f)}, {"origin", "user"}});
        };
        add(text_files, "text");
        add(doc_files, "pre-extracted-document");
        add(transcript_files, "transcript");
        for (const auto& ref : image_refs)
          req["materials"].push_back({{"source_kind", "image-reference"}, {"content", ref}, {"origin", "user"}});
        for (const auto& f : externals) req["external_snippets"].push_back(slurp(f));
      }
      if (!product_id.empty()) req["product_id"] = product_id;
      const auto be = backend_profile(off_backend, off_backend_file);
      Owned r;
      check(sc_offline_integrate(req.dump().c_str(), cstr(be), &r.p));
      if (!store_dir.empty()) {
        sc_record_store* store = nullptr;
        check(sc_record_store_open(store_dir.c_str(), &store));
        const auto s = sc_record_save(store, r.p);
        sc_record_store_close(store);
        check(s);
      }
      emit(r.str(), integ_out);
    } else if (copy->parsed()) {
      std::string record;
      if (!copy_record.empty()) {
        record = slurp(copy_record);
      } else if (!copy_store.empty() && !copy_product.empty()) {
        sc_record_store* store = nullptr;
        check(sc_record_store_open(copy_store.c_str(), &store));
        Owned r;
        const auto s = sc_record_load(store, copy_product.c_str(), &r.p);
        sc_record_store_close(store);
        check(s);
        record = r.str();
      } else {
        std::cerr << "error (invalid_argument): pass --record or --store with --product-id\n";
        return SC_ERR_INVALID_ARGUMENT;
      }
      if (style.empty() && exemplar.empty()) style = "general";
      const auto ex = exemplar.empty() ? std::optional<std::string>{} : std::optional<std::string>(slurp(exemplar));
      const auto be = backend_profile(off_backend, off_backend_file);
      Owned r;
      check(sc_offline_copy(record.c_str(), style.empty() ? nullptr : style.c_str(), cstr(ex), cstr(be), &r.p));
      auto doc = json::parse(r.str());
      if (!copy_lexicon.empty()) {
        sc_lexicon* lex = nullptr;
        check(sc_lexicon_load(copy_lexicon.c_str(), &lex));
        json reports = json::array();
        auto clean = [&](std::string& text) {
          Owned p;
          const auto s = sc_purify(lex, text.c_str(), nullptr, &p.p);
          if (s != SC_OK) {
            sc_lexicon_destroy(lex);
            check(s);
          }
          const auto pr = json::parse(p.str());
          text = pr["text"].get<std::string>();
          reports.push_back(pr["report"]);
        };
        std::string body = doc["body"].get<std::string>();
        clean(body);
        doc["body"] = body;
        for (auto& phrase : doc["interaction_phrases"]) {
          std::string t = phrase.get<std::string>();
          clean(t);
          phrase = t;
        }
        sc_lexicon_destroy(lex);
        doc["purification"] = reports;
      }
      std::cout << doc.dump(2) << "\n";
    } else if (pur->parsed()) {
      std::string text = pur_text;
      if (!pur_input.empty()) text = slurp(pur_input);
      sc_lexicon* lex = nullptr;
      check(sc_lexicon_load(lexicon_path.c_str(), &lex));
      std::optional<std::string> be;
      if (use_backend) be = backend_profile(off_backend, off_backend_file).value_or("{}");
      Owned r;
      const auto s = sc_purify(lex, text.c_str(), cstr(be), &r.p);
      sc_lexicon_destroy(lex);
      check(s);
      emit(r.str(), "");
    } else if (serve->parsed()) {
      json overrides = json::object();
      if (!host.empty()) overrides["host"] = host;
      if (port >= 0) overrides["port"] = port;
      if (!storage.empty()) overrides["storage_path"] = storage;
      check(sc_service_create(cfg_path.empty() ? nullptr : cfg_path.c_str(), overrides.dump().c_str(),
                              &g_service));
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const auto s = sc_service_run(g_service);
      sc_service_destroy(g_service);
      g_service = nullptr;
      check(s);
    } else if (sim->parsed()) {
      Owned t, m;
      check(sc_simulate(scenario.c_str(), sim_seed, &t.p, &m.p));
      if (transcript_out.empty()) {
        std::cout << t.str();
      } else {
        std::ofstream(transcript_out) << t.str();
      }
      const auto metrics = json::parse(m.str()).dump(2) + "\n";
      if (metrics_out.empty()) {
        std::cerr << metrics;
      } else {
        std::ofstream(metrics_out) << metrics;
      }
    }
  } catch (const Failure& f) {
    return static_cast<int>(f.status);
  } catch (const json::exception& e) {
    std::cerr << "error (parse): " << e.what() << "\n";
    return SC_ERR_PARSE;
  }
  return 0;
}
