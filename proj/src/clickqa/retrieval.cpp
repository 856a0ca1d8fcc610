#include "clickqa/retrieval.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "offline/record_match.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>

namespace streamcart::clickqa {

FixtureRetriever::FixtureRetriever(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    std::vector<std::string> st;
    for (const auto& k : e.keywords) {
      for (const auto& w : text::keywords(k)) st.push_back(w);
    }
    stems_.push_back(std::move(st));
  }
}

FixtureRetriever FixtureRetriever::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open retrieval corpus: " + path);
  std::vector<Entry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      entries.push_back({doc.at("keywords").get<std::vector<std::string>>(),
                         doc.at("snippet").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return FixtureRetriever(std::move(entries));
}

std::optional<std::string> FixtureRetriever::retrieve(std::string_view question) {
  const auto kw = text::keywords(question);
  size_t best = 0;
  std::optional<size_t> best_idx;
  for (size_t i = 0; i < entries_.size(); ++i) {
    size_t score = 0;
    for (const auto& s : stems_[i]) {
      if (std::find(kw.begin(), kw.end(), s) != kw.end()) ++score;
    }
    if (score > best) {
      best = score;
      best_idx = i;
    }
  }
  if (!best_idx) return std::nullopt;
  return entries_[*best_idx].snippet;
}

bool retrieval_needed(std::string_view question, std::string_view draft_answer,
                      const offline::ProductRecord& record) {
  if (text::normalize_whitespace(draft_answer) == backend::kFallbackAnswer) return true;
  return offline::match_record_fields(question, record).empty();
}

std::optional<std::string> maybe_retrieve(std::string_view question, std::string_view draft_answer,
                                          const offline::ProductRecord& record, Retriever* retriever) {
  if (retriever == nullptr || !retrieval_needed(question, draft_answer, record)) return std::nullopt;
  try {
    return retriever->retrieve(question);
  } catch (const std::exception& e) {
    spdlog::warn("supplementary retrieval failed, continuing without it: {}", e.what());
    return std::nullopt;
  }
}

} // namespace streamcart::clickqa
