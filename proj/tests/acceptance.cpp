// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include "backend/mock_backend.hpp"
#include "clickqa/evaluate.hpp"
#include "clickqa/judge.hpp"
#include "common/error.hpp"
#include "common/instrument.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "datasynth/datasynth.hpp"
#include "kea/kea.hpp"
#include "offline/lexicon.hpp"
#include "offline/purify.hpp"
#include "offline/record_store.hpp"
#include "oracles.hpp"
#include "service/service.hpp"
#include "service/simulate.hpp"
#include "ses/ses.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace streamcart;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string src(const std::string& rel) { return std::string(STREAMCART_SOURCE_DIR) + "/" + rel; }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- segmentation ---------------------------------------------------------

std::vector<ses::FrameFeature> random_stream(Rng& rng, size_t n) {
  std::vector<ses::FrameFeature> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    ses::FrameFeature f{static_cast<int64_t>(i), i / 30.0, rng.uniform(0.6, 1.0), rng.uniform(0.0, 0.3)};
    if (rng.below(50) == 0) {
      f.vit_similarity = rng.uniform(-0.2, 0.3);
      f.flow_magnitude = rng.uniform(0.0, 0.05);
    }
    out.push_back(f);
  }
  return out;
}

Outcome ses_equivalence() {
  constexpr int kSeeds = 100;
  double elapsed = 0.0;
  size_t frames = 0;
  size_t boundaries = 0;
  int mismatches = 0;
  int oracle_mismatches = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    Rng rng(static_cast<uint64_t>(seed));
    const auto signal = random_stream(rng, 500 + rng.below(4501));
    ses::SesConfig cfg;
    cfg.gamma = rng.uniform(0.0, 1.0);
    cfg.alpha = rng.uniform(0.0, 2.0);
    cfg.window_size = static_cast<int>(rng.between(8, 96));
    cfg.min_segment_len = static_cast<int>(rng.between(1, std::min<int64_t>(16, cfg.window_size - 1)));
    frames += signal.size();

    const auto t0 = Clock::now();
    ses::SesStream stream(cfg);
    std::vector<ses::EventSegment> streamed;
    for (const auto& f : signal) {
      if (auto s = stream.push(f)) streamed.push_back(*s);
    }
    for (const auto& s : stream.flush()) streamed.push_back(s);
    const auto offline = ses::segment_offline(signal, cfg);
    elapsed += seconds_since(t0);

    if (streamed != offline) ++mismatches;
    boundaries += offline.size() - 1;

    std::vector<oracle::Frame> of;
    for (const auto& f : signal) of.push_back({f.vit_similarity, f.flow_magnitude});
    std::vector<int64_t> starts;
    for (size_t i = 1; i < offline.size(); ++i) starts.push_back(offline[i].start_frame);
    if (starts != oracle::boundaries(of, {cfg.gamma, cfg.alpha, cfg.window_size, cfg.min_segment_len,
                                          cfg.warmup()}))
      ++oracle_mismatches;
  }
  return {mismatches == 0 && oracle_mismatches == 0 && elapsed < 10.0,
          fmt("%d streams, %zu frames, %zu boundaries, %d stream/offline mismatches, %d oracle mismatches, %.2f s",
              kSeeds, frames, boundaries, mismatches, oracle_mismatches, elapsed)};
}

Outcome ses_single_dip() {
  ses::SesConfig cfg;
  cfg.gamma = 0.5;
  cfg.alpha = 1.0;
  std::vector<ses::FrameFeature> dip;
  for (int i = 0; i < 100; ++i) {
    const double c = i == 50 ? 0.1 : 0.9;
    dip.push_back({i, i / 30.0, c, c});
  }
  ses::SesStream stream(cfg);
  std::vector<int64_t> starts;
  for (const auto& f : dip) {
    if (auto s = stream.push(f)) starts.push_back(s->end_frame + 1);
  }
  const auto tail = stream.flush();
  for (size_t i = 0; i + 1 < tail.size(); ++i) starts.push_back(tail[i].end_frame + 1);

  size_t constant_boundaries = 0;
  for (double level : {0.0, 0.5, 0.9, 1.0}) {
    std::vector<ses::FrameFeature> flat;
    for (int i = 0; i < 300; ++i) flat.push_back({i, i / 30.0, level, level});
    constant_boundaries += ses::segment_offline(flat, cfg).size() - 1;
  }
  const bool ok = starts == std::vector<int64_t>{50} && constant_boundaries == 0;
  std::string got;
  for (auto s : starts) got += (got.empty() ? "" : ",") + std::to_string(s);
  return {ok, "dip boundaries [" + got + "] (want [50]); constant-signal boundaries " +
                  std::to_string(constant_boundaries)};
}

// ---- truncation -----------------------------------------------------------

Outcome kea_equivalence() {
  Rng rng(2024);
  int mismatches = 0;
  constexpr int kTraces = 1000;
  for (int t = 0; t < kTraces; ++t) {
    const size_t n = 2 + rng.below(511);
    std::vector<double> lp(n);
    for (auto& x : lp) x = rng.below(6) == 0 ? -rng.uniform(0.5, 8.0) : -rng.uniform(0.0, 0.6);
    kea::KeaConfig cfg;
    cfg.delta = static_cast<int>(rng.between(1, 10));
    cfg.alpha = rng.uniform(0.0, 3.0);
    cfg.beta = rng.uniform(0.0, 2.0);
    const auto got = kea::find_truncation(kea::scores_from_log_probs(lp), cfg);
    const auto want = oracle::truncation(lp, cfg.delta, cfg.alpha, cfg.beta);
    const size_t want_len = want ? *want - 1 : n;
    if (got.index != want || got.prefix_len != want_len) ++mismatches;
  }
  std::vector<double> worked(5, -0.1);
  worked.push_back(-2.0);
  worked.insert(worked.end(), 4, -0.1);
  kea::KeaConfig cfg;
  cfg.delta = 5;
  cfg.beta = 0.8;
  const auto r = kea::find_truncation(kea::scores_from_log_probs(worked), cfg);
  const bool example_ok = r.index == std::optional<size_t>(6);
  return {mismatches == 0 && example_ok,
          fmt("%d traces (L<=512), %d mismatches; worked example o=%s", kTraces, mismatches,
              r.index ? std::to_string(*r.index).c_str() : "none")};
}

// ---- reward ---------------------------------------------------------------

Outcome reward_table() {
  clickqa::ExactJudge judge;
  const double both = clickqa::reward("What is the price?", "39.90 USD", "What is the price?", "39.90 USD", judge);
  const double q_only = clickqa::reward("What is the price?", "40 USD", "What is the price?", "39.90 USD", judge);
  const double none = clickqa::reward("How heavy is it?", "39.90 USD", "What is the price?", "39.90 USD", judge);

  Rng rng(99);
  const char* atoms[] = {"price", "Price", "size", " ", "?", "battery", "", "mAh", "  ", "what"};
  auto fuzz = [&] {
    std::string s;
    for (size_t i = rng.below(5); i > 0; --i) s += atoms[rng.below(std::size(atoms))];
    return s;
  };
  int violations = 0;
  constexpr int kCases = 20000;
  for (int i = 0; i < kCases; ++i) {
    const auto qh = fuzz(), ah = fuzz(), qs = rng.below(3) == 0 ? qh : fuzz(), as = rng.below(3) == 0 ? ah : fuzz();
    // Blank gold is a validation error, not a reward.
    if (text::trim(qs).empty() || text::trim(as).empty()) {
      bool threw = false;
      try {
        clickqa::reward(qh, ah, qs, as, judge);
      } catch (const Error& e) {
        threw = e.code() == ErrorCode::kValidation;
      }
      if (!threw) ++violations;
      continue;
    }
    const double r = clickqa::reward(qh, ah, qs, as, judge);
    if (r != 0.0 && r != 0.5 && r != 1.0) ++violations;
    if (!clickqa::questions_match(qh, qs) && r != 0.0) ++violations;
  }
  return {both == 1.0 && q_only == 0.5 && none == 0.0 && violations == 0,
          fmt("cases %.1f/%.1f/%.1f (want 1/0.5/0); %d fuzz cases, %d violations", both, q_only, none, kCases,
              violations)};
}

// ---- geometric QRA --------------------------------------------------------

Outcome geometric_qra() {
  const auto pool = datasynth::read_qa_pool(src("data/demo/qa_pool.jsonl"));
  datasynth::SynthConfig cfg;
  cfg.num_images = 200;
  cfg.questions_per_image = 4;
  cfg.seed = 42;
  const auto samples = datasynth::generate_dataset(pool, cfg);
  offline::ProductRecord record;
  record.product_id = "evaluation";
  record.name = "evaluation product";
  clickqa::ExactJudge judge;

  backend::MockBackend clean;
  clickqa::prime_mock(clean, samples);
  const auto m = clickqa::evaluate_dataset(samples, clean, judge, record);

  backend::BackendProfile profile;
  profile.seed = 7;
  profile.question_corruption = 0.2;
  backend::MockBackend noisy(profile);
  clickqa::prime_mock(noisy, samples);
  size_t corrupted = 0;
  for (const auto& s : samples) corrupted += noisy.corrupts(s.click) ? 1 : 0;
  const auto mc = clickqa::evaluate_dataset(samples, noisy, judge, record);
  const double want = 1.0 - static_cast<double>(corrupted) / static_cast<double>(samples.size());

  const bool ok = samples.size() == 800 && m.overall.qra() == 1.0 && mc.overall.qra() == want;
  return {ok, fmt("%zu samples: QRA %.4f (want 1); 20%% corruption: %zu corrupted, QRA %.4f (want %.4f); "
                  "reference QRA %.3f / RQ %.3f not asserted",
                  samples.size(), m.overall.qra(), corrupted, mc.overall.qra(), want, clickqa::kReferenceQra,
                  clickqa::kReferenceRq)};
}

// ---- purifier -------------------------------------------------------------

Outcome purifier() {
  const auto lex = offline::read_lexicon_file(src("data/demo/lexicon.tsv"));
  const std::vector<std::string> clean_words = {"this",  "blender", "is",    "fresh", "cure",   "worlds",
                                                "miracles", "guaranteed", "one", "our", "bestseller", "quiet",
                                                "cured", "numbers", "in",    "the",   "100%",   "ok"};
  const char* seps[] = {" ", " ", ", ", ". ", "  ", "\t", "! ", "-"};
  Rng rng(31337);
  auto plant = [&](std::string p) {
    for (auto& c : p) {
      if (rng.below(3) == 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return p;
  };
  constexpr int kTexts = 10000;
  int leftovers = 0, not_idempotent = 0, undetected = 0, clean_changed = 0, clean_total = 0;
  for (int t = 0; t < kTexts; ++t) {
    const bool planted = t % 4 != 3;
    std::string text;
    const size_t n = 1 + rng.below(30);
    for (size_t i = 0; i < n; ++i) {
      if (i > 0) text += seps[rng.below(std::size(seps))];
      if (planted && rng.below(5) == 0)
        text += plant(lex.entries()[rng.below(lex.entries().size())].pattern);
      else
        text += clean_words[rng.below(clean_words.size())];
    }
    if (planted) {
      text += " " + plant(lex.entries()[rng.below(lex.entries().size())].pattern);
      const auto r = offline::purify(text, lex);
      if (r.report.count_before == 0) ++undetected;
      if (!offline::detect_prohibited(r.text, lex).empty()) ++leftovers;
      if (offline::purify(r.text, lex).text != r.text) ++not_idempotent;
    } else if (offline::detect_prohibited(text, lex).empty()) {
      ++clean_total;
      const auto r = offline::purify(text, lex);
      if (r.text != text || !r.report.empty()) ++clean_changed;
    }
  }
  return {leftovers == 0 && not_idempotent == 0 && undetected == 0 && clean_changed == 0 && clean_total > 0,
          fmt("%d texts: %d with terms left, %d not idempotent, %d plants missed; %d clean texts, %d changed",
              kTexts, leftovers, not_idempotent, undetected, clean_total, clean_changed)};
}

// ---- asynchrony -----------------------------------------------------------

double env_seconds(const char* name, double fallback) {
  if (const char* v = std::getenv(name)) {
    try {
      return std::stod(v);
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

double p99(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const size_t idx = static_cast<size_t>(std::ceil(0.99 * static_cast<double>(xs.size()))) - 1;
  return xs[std::min(idx, xs.size() - 1)];
}

// Clicks at a fixed rate for `seconds`, returning client-side latencies (ms).
std::vector<double> click_phase(int port, const std::string& sid, double seconds, int& errors) {
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  client.set_tcp_nodelay(true);
  const std::string body = json{{"frame_id", 0}, {"x", 200}, {"y", 898}}.dump();
  std::vector<double> lat;
  const auto start = Clock::now();
  const auto period = std::chrono::milliseconds(100);
  for (int i = 0;; ++i) {
    const auto due = start + i * period;
    if (std::chrono::duration<double>(due - start).count() >= seconds) break;
    std::this_thread::sleep_until(due);
    const auto t0 = Clock::now();
    auto res = client.Post("/sessions/" + sid + "/click", body, "application/json");
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (!res || res->status != 200) {
      ++errors;
      continue;
    }
    lat.push_back(ms);
  }
  return lat;
}

Outcome asynchrony() {
  const double seconds = env_seconds("STREAMCART_ASYNC_SECONDS", 60.0);
  const auto storage = std::filesystem::temp_directory_path() / "streamcart-acceptance-async";
  std::filesystem::remove_all(storage);
  service::ServiceConfig cfg;
  cfg.port = 0;
  cfg.threads = 4;
  cfg.storage_path = storage.string();
  cfg.ses.alpha = 3.0;
  cfg.backend.latency[static_cast<int>(backend::Task::kCaption)] = std::chrono::milliseconds(200);
  cfg.backend.latency[static_cast<int>(backend::Task::kQuestion)] = std::chrono::milliseconds(5);
  cfg.backend.latency[static_cast<int>(backend::Task::kAnswer)] = std::chrono::milliseconds(5);
  service::Service svc(cfg);
  svc.start();
  httplib::Client c("127.0.0.1", svc.port());
  offline::ProductRecord record;
  record.product_id = "async";
  record.name = "Async Blender";
  record.price = "10 USD";
  record.specifications = {{"battery", "4000 mAh"}};
  c.Post("/products", json{{"record", record}}.dump(), "application/json");
  const std::string sid =
      json::parse(c.Post("/sessions", json{{"product_id", "async"}}.dump(), "application/json")->body)["session_id"];
  const json overlay = {{"frame_id", 0}, {"width", 720}, {"height", 1280},
                        {"messages", {{{"message_id", "m0"}, {"text", "How long does the battery last?"},
                                       {"bbox", {24, 880, 408, 916}}}}}};
  c.Post("/sessions/" + sid + "/overlays", overlay.dump(), "application/json");
  instrument::reset_counters();

  int errors = 0;
  // Warm-up so neither phase pays for the first render and connection.
  click_phase(svc.port(), sid, 1.0, errors);
  errors = 0;
  const auto baseline = click_phase(svc.port(), sid, seconds, errors);

  std::atomic<bool> stop{false};
  std::atomic<int> ingest_errors{0};
  std::atomic<int64_t> sent{0};
  std::thread ingest([&] {
    httplib::Client fc("127.0.0.1", svc.port());
    fc.set_keep_alive(true);
    fc.set_tcp_nodelay(true);
    const auto start = Clock::now();
    const auto period = std::chrono::microseconds(1000000 / 30);
    for (int64_t i = 0; !stop.load(); ++i) {
      std::this_thread::sleep_until(start + i * period);
      const bool cut = i > 0 && i % 60 == 0;
      const json f = {{"frame_id", i + 1},
                      {"timestamp", (i + 1) / 30.0},
                      {"vit_similarity", cut ? 0.15 : 0.95},
                      {"flow_magnitude", cut ? 0.02 : 0.30}};
      auto res = fc.Post("/sessions/" + sid + "/frames", json{{"frames", {f}}}.dump(), "application/json");
      if (!res || res->status != 202) ++ingest_errors;
      ++sent;
    }
  });
  const auto loaded = click_phase(svc.port(), sid, seconds, errors);
  stop = true;
  ingest.join();
  svc.session(sid)->drain();
  const auto st = svc.session(sid)->stats();
  const auto counters = instrument::counters();
  svc.stop();

  const double base = p99(baseline);
  const double load = p99(loaded);
  const double diff = base > 0 ? std::abs(load - base) / base : 1.0;
  const bool ok = diff < 0.20 && errors == 0 && ingest_errors.load() == 0 && st.segments >= 2 &&
                  counters.segmentation_on_request_path == 0 && counters.caption_on_request_path == 0;
  return {ok, fmt("%.0f s per phase; p99 baseline %.2f ms, under ingestion %.2f ms (%+.1f%%, limit 20%%); "
                  "%zu+%zu clicks, %d click errors; %lld frames sent, %llu captioned segments; "
                  "request-path segmentation/captioning %llu/%llu",
                  seconds, base, load, 100.0 * (load - base) / base, baseline.size(), loaded.size(), errors,
                  static_cast<long long>(sent.load()), static_cast<unsigned long long>(st.segments),
                  static_cast<unsigned long long>(counters.segmentation_on_request_path),
                  static_cast<unsigned long long>(counters.caption_on_request_path))};
}

// ---- determinism and persistence -----------------------------------------

Outcome determinism() {
  const auto path = src("data/demo/scenario.jsonl");
  const auto a = service::run_simulation(path).transcript();
  const auto b = service::run_simulation(path).transcript();
  return {a == b && !a.empty(), fmt("transcripts of %zu and %zu bytes, %s", a.size(), b.size(),
                                    a == b ? "byte-identical" : "different")};
}

std::string random_string(Rng& rng, size_t min_len, size_t max_len) {
  static const std::vector<std::string> atoms = {"a", "Z", "7", " ", "-", "/", "%", "\"", "\\", "\n", "\t",
                                                 "é", "ß", "中", "文", "€", "🙂", ":", ",", "{", "}"};
  std::string s;
  const size_t n = static_cast<size_t>(rng.between(static_cast<int64_t>(min_len), static_cast<int64_t>(max_len)));
  for (size_t i = 0; i < n; ++i) s += atoms[rng.below(atoms.size())];
  return s;
}

Outcome persistence() {
  const auto dir = std::filesystem::temp_directory_path() / "streamcart-acceptance-records";
  std::filesystem::remove_all(dir);
  offline::RecordStore store(dir);
  Rng rng(4242);
  std::vector<offline::ProductRecord> records;
  constexpr int kRecords = 1000;
  for (int i = 0; i < kRecords; ++i) {
    offline::ProductRecord r;
    r.product_id = std::to_string(i) + "-" + random_string(rng, 0, 12);
    r.name = random_string(rng, 1, 40);
    r.price = random_string(rng, 0, 10);
    for (size_t k = rng.below(6); k > 0; --k) r.specifications.push_back({random_string(rng, 1, 10), random_string(rng, 0, 20)});
    for (size_t k = rng.below(6); k > 0; --k) r.key_features.push_back(random_string(rng, 0, 30));
    for (size_t k = rng.below(4); k > 0; --k) r.service_details.push_back(random_string(rng, 0, 30));
    for (size_t k = rng.below(4); k > 0; --k)
      r.provenance.push_back({random_string(rng, 1, 12), rng.below(2) ? offline::Origin::kUser : offline::Origin::kExternal,
                              random_string(rng, 0, 20)});
    store.save(r);
    records.push_back(std::move(r));
  }
  int mismatches = 0;
  for (const auto& r : records) {
    if (!(store.load(r.product_id) == r)) ++mismatches;
  }
  const size_t listed = store.list().size();
  return {mismatches == 0 && listed == kRecords,
          fmt("%d records saved and reloaded, %d mismatches, %zu listed", kRecords, mismatches, listed)};
}

} // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ses-oracle-equivalence", ses_equivalence},
      {"ses-single-dip", ses_single_dip},
      {"kea-oracle-equivalence", kea_equivalence},
      {"reward-table", reward_table},
      {"geometric-qra", geometric_qra},
      {"purifier-completeness", purifier},
      {"asynchrony", asynchrony},
      {"determinism", determinism},
      {"persistence-round-trip", persistence},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
