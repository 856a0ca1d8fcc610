#pragma once

#include "offline/record.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamcart::clickqa {

class Retriever {
public:
  virtual ~Retriever() = default;
  virtual std::optional<std::string> retrieve(std::string_view question) = 0;
};

// Snippets keyed by keywords. The snippet sharing the most (stemmed)
// keywords with the question wins; earlier entries win ties.
class FixtureRetriever : public Retriever {
public:
  struct Entry {
    std::vector<std::string> keywords;
    std::string snippet;
  };

  FixtureRetriever() = default;
  explicit FixtureRetriever(std::vector<Entry> entries);

  // JSONL: {"keywords": [...], "snippet": "..."} per line.
  static FixtureRetriever from_file(const std::string& path);

  std::optional<std::string> retrieve(std::string_view question) override;
  const std::vector<Entry>& entries() const { return entries_; }

private:
  std::vector<Entry> entries_;
  std::vector<std::vector<std::string>> stems_;
};

// Retrieval fires when the draft answer is the fallback marker or when no
// record field shares a keyword with the question.
bool retrieval_needed(std::string_view question, std::string_view draft_answer,
                      const offline::ProductRecord& record);

// Retriever failures are logged and treated as "nothing found".
std::optional<std::string> maybe_retrieve(std::string_view question, std::string_view draft_answer,
                                          const offline::ProductRecord& record, Retriever* retriever);

} // namespace streamcart::clickqa
