#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace streamcart::offline {

enum class LexiconAction { kRemove, kReplace };

const char* action_name(LexiconAction a);

struct LexiconEntry {
  std::string pattern;
  LexiconAction action = LexiconAction::kRemove;
  std::string replacement;
  std::string category;
};

struct ProhibitedMatch {
  size_t entry = 0;  // index into Lexicon::entries()
  size_t begin = 0;  // byte offsets, half-open
  size_t end = 0;
};

// Prohibited-term lexicon, matched case-insensitively (ASCII folding) on
// whole words. Construction validates the entries and compiles an
// Aho-Corasick automaton over the folded patterns.
class Lexicon {
public:
  Lexicon() = default;
  explicit Lexicon(std::vector<LexiconEntry> entries);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Every whole-word occurrence of every pattern, overlaps included,
  // ordered by end offset.
  std::vector<ProhibitedMatch> all_occurrences(std::string_view text) const;

private:
  struct State {
    std::array<int32_t, 256> next;
    int32_t fail = 0;
    std::vector<size_t> out;  // entries ending here, via suffix links too
  };

  void build();

  std::vector<LexiconEntry> entries_;
  std::vector<State> states_;
};

// Leftmost-longest, non-overlapping whole-word matches.
std::vector<ProhibitedMatch> detect_prohibited(std::string_view text, const Lexicon& lexicon);

// Lexicon file:
//   #lexicon version=1
//   <pattern>\t<remove|replace>\t<replacement>\t<category>
Lexicon read_lexicon(std::istream& in);
Lexicon read_lexicon_file(const std::string& path);
void write_lexicon(std::ostream& out, const Lexicon& lexicon);

} // namespace streamcart::offline
