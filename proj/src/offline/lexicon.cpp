#include "offline/lexicon.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>

namespace streamcart::offline {

namespace {

unsigned char fold(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c;
}

bool whole_word(std::string_view text, size_t b, size_t e, std::string_view pattern) {
  const auto first = static_cast<unsigned char>(pattern.front());
  const auto last = static_cast<unsigned char>(pattern.back());
  if (text::is_word_byte(first) && b > 0 && text::is_word_byte(static_cast<unsigned char>(text[b - 1])))
    return false;
  if (text::is_word_byte(last) && e < text.size() &&
      text::is_word_byte(static_cast<unsigned char>(text[e])))
    return false;
  return true;
}

} // namespace

const char* action_name(LexiconAction a) { return a == LexiconAction::kRemove ? "remove" : "replace"; }

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.pattern.empty()) fail(ErrorCode::kValidation, "lexicon pattern must be non-empty");
    if (text::trim(e.pattern) != e.pattern)
      fail(ErrorCode::kValidation, "lexicon pattern has surrounding whitespace: '" + e.pattern + "'");
    if (!seen.insert(text::ascii_lower(e.pattern)).second)
      fail(ErrorCode::kValidation, "duplicate lexicon pattern '" + e.pattern + "'");
    if (e.action == LexiconAction::kReplace && e.replacement.empty())
      fail(ErrorCode::kValidation, "replace entry '" + e.pattern + "' needs a replacement");
  }
  build();
  for (const auto& e : entries_) {
    if (e.action == LexiconAction::kReplace && !detect_prohibited(e.replacement, *this).empty()) {
      fail(ErrorCode::kValidation,
           "replacement for '" + e.pattern + "' contains a prohibited term itself");
    }
  }
}

void Lexicon::build() {
  states_.clear();
  states_.push_back(State{});
  states_[0].next.fill(-1);
  for (size_t idx = 0; idx < entries_.size(); ++idx) {
    int32_t s = 0;
    for (unsigned char c : entries_[idx].pattern) {
      const unsigned char f = fold(c);
      if (states_[static_cast<size_t>(s)].next[f] < 0) {
        states_[static_cast<size_t>(s)].next[f] = static_cast<int32_t>(states_.size());
        states_.push_back(State{});
        states_.back().next.fill(-1);
      }
      s = states_[static_cast<size_t>(s)].next[f];
    }
    states_[static_cast<size_t>(s)].out.push_back(idx);
  }

  // Breadth-first: failure links, then complete the transition table.
  std::queue<int32_t> queue;
  for (auto& nx : states_[0].next) {
    if (nx < 0) {
      nx = 0;
    } else {
      states_[static_cast<size_t>(nx)].fail = 0;
      queue.push(nx);
    }
  }
  while (!queue.empty()) {
    const int32_t s = queue.front();
    queue.pop();
    auto& st = states_[static_cast<size_t>(s)];
    const auto& inherited = states_[static_cast<size_t>(st.fail)].out;
    st.out.insert(st.out.end(), inherited.begin(), inherited.end());
    for (int c = 0; c < 256; ++c) {
      const int32_t nx = states_[static_cast<size_t>(s)].next[static_cast<size_t>(c)];
      const int32_t via_fail = states_[static_cast<size_t>(states_[static_cast<size_t>(s)].fail)].next[static_cast<size_t>(c)];
      if (nx < 0) {
        states_[static_cast<size_t>(s)].next[static_cast<size_t>(c)] = via_fail;
      } else {
        states_[static_cast<size_t>(nx)].fail = via_fail;
        queue.push(nx);
      }
    }
  }
}

std::vector<ProhibitedMatch> Lexicon::all_occurrences(std::string_view text) const {
  std::vector<ProhibitedMatch> found;
  if (states_.empty()) return found;
  int32_t s = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    s = states_[static_cast<size_t>(s)].next[fold(static_cast<unsigned char>(text[i]))];
    for (size_t idx : states_[static_cast<size_t>(s)].out) {
      const auto& pattern = entries_[idx].pattern;
      const size_t e = i + 1;
      const size_t b = e - pattern.size();
      if (whole_word(text, b, e, pattern)) found.push_back({idx, b, e});
    }
  }
  return found;
}

std::vector<ProhibitedMatch> detect_prohibited(std::string_view text, const Lexicon& lexicon) {
  auto all = lexicon.all_occurrences(text);
  std::sort(all.begin(), all.end(), [](const ProhibitedMatch& a, const ProhibitedMatch& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::vector<ProhibitedMatch> picked;
  size_t covered = 0;
  for (const auto& m : all) {
    if (m.begin < covered) continue;
    picked.push_back(m);
    covered = m.end;
  }
  return picked;
}

Lexicon read_lexicon(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("#lexicon", 0) != 0) fail(ErrorCode::kParse, "line 1: missing '#lexicon' header");
      if (line.find("version=1") == std::string::npos)
        fail(ErrorCode::kMigration, "unsupported lexicon version: " + line);
      header_seen = true;
      continue;
    }
    if (text::trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 4)
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 2-4 tab-separated fields");
    LexiconEntry e;
    e.pattern = cols[0];
    if (cols[1] == "remove") {
      e.action = LexiconAction::kRemove;
    } else if (cols[1] == "replace") {
      e.action = LexiconAction::kReplace;
    } else {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unknown action '" + cols[1] + "'");
    }
    if (cols.size() > 2) e.replacement = cols[2];
    if (cols.size() > 3) e.category = cols[3];
    entries.push_back(std::move(e));
  }
  if (!header_seen) fail(ErrorCode::kParse, "empty lexicon file");
  return Lexicon(std::move(entries));
}

Lexicon read_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open lexicon file: " + path);
  return read_lexicon(in);
}

void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  out << "#lexicon version=1\n";
  for (const auto& e : lexicon.entries()) {
    out << e.pattern << '\t' << action_name(e.action) << '\t' << e.replacement << '\t' << e.category
        << "\n";
  }
}

} // namespace streamcart::offline
