#include "offline/purify.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace streamcart::offline {

namespace {

constexpr int kReplaceRounds = 4;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_closing_punct(char c) {
  return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')';
}

} // namespace

std::string apply_matches(std::string_view text, const std::vector<ProhibitedMatch>& matches,
                          const Lexicon& lexicon, bool remove_only) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  for (const auto& m : matches) {
    const auto& entry = lexicon.entries()[m.entry];
    out.append(text.substr(pos, m.begin - pos));
    pos = m.end;
    if (entry.action == LexiconAction::kReplace && !remove_only) {
      out += entry.replacement;
      continue;
    }
    // Removal: "a X b" -> "a b", "a X, b" -> "a, b", "X b" -> "b".
    const bool left_open = out.empty() || is_space(out.back());
    if (left_open) {
      while (pos < text.size() && is_space(text[pos])) ++pos;
      const bool at_end = pos == text.size();
      if (at_end || is_closing_punct(text[pos])) {
        while (!out.empty() && is_space(out.back())) out.pop_back();
      }
    }
  }
  out.append(text.substr(pos));
  return out;
}

PurifyResult purify(std::string_view text, const Lexicon& lexicon, backend::ModelBackend* backend) {
  PurifyResult result;
  auto found = detect_prohibited(text, lexicon);
  result.report.count_before = found.size();
  if (found.empty()) {
    result.text = std::string(text);
    return result;
  }

  std::string current(text);
  if (backend != nullptr) {
    backend::RewriteRequest req;
    req.text = current;
    for (const auto& m : found) req.flagged_terms.emplace_back(text.substr(m.begin, m.end - m.begin));
    try {
      current = backend->rewrite(req);
      result.report.rewritten = true;
      found = detect_prohibited(current, lexicon);
    } catch (const Error& e) {
      spdlog::warn("purify: backend rewrite failed, using the lexicon pass only: {}", e.what());
    }
  }

  for (int pass = 0; !found.empty(); ++pass) {
    for (const auto& m : found) {
      const auto& entry = lexicon.entries()[m.entry];
      const bool forced = pass >= kReplaceRounds;
      result.report.matches.push_back({entry.pattern, m.begin, m.end,
                                       forced ? LexiconAction::kRemove : entry.action,
                                       entry.category, pass});
    }
    current = apply_matches(current, found, lexicon, pass >= kReplaceRounds);
    found = detect_prohibited(current, lexicon);
  }
  result.report.count_after = 0;
  result.text = std::move(current);
  return result;
}

void to_json(nlohmann::json& j, const PurificationReport& r) {
  j = nlohmann::json{{"count_before", r.count_before},
                     {"count_after", r.count_after},
                     {"rewritten", r.rewritten},
                     {"matches", nlohmann::json::array()}};
  for (const auto& m : r.matches) {
    j["matches"].push_back({{"pattern", m.pattern},
                            {"span", {m.begin, m.end}},
                            {"action", action_name(m.action)},
                            {"category", m.category},
                            {"pass", m.pass}});
  }
}

} // namespace streamcart::offline
