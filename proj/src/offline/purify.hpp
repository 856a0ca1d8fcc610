#pragma once

#include "offline/lexicon.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::offline {

struct PurificationMatch {
  std::string pattern;
  size_t begin = 0;  // span in the text of the pass that found it
  size_t end = 0;
  LexiconAction action = LexiconAction::kRemove;
  std::string category;
  int pass = 0;  // 0 is the first deterministic pass
};

struct PurificationReport {
  std::vector<PurificationMatch> matches;
  size_t count_before = 0;
  size_t count_after = 0;
  bool rewritten = false;  // a backend rewrite ran before the lexicon pass

  bool empty() const { return matches.empty() && count_before == 0; }
};

struct PurifyResult {
  std::string text;
  PurificationReport report;
};

// Applies one round of lexicon actions to the given (non-overlapping,
// ordered) matches. Removal repairs the whitespace around the gap.
std::string apply_matches(std::string_view text, const std::vector<ProhibitedMatch>& matches,
                          const Lexicon& lexicon, bool remove_only = false);

// Optional backend rewrite, then the deterministic pass repeated until no
// whole-word match is left. A replacement can only re-create a match
// together with its surroundings, so after a few rounds the pass falls back
// to plain removal, which always terminates.
// Clean input is returned untouched and the backend is not called.
PurifyResult purify(std::string_view text, const Lexicon& lexicon,
                    backend::ModelBackend* backend = nullptr);

void to_json(nlohmann::json& j, const PurificationReport& r);

} // namespace streamcart::offline
