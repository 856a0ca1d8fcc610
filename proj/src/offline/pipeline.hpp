#pragma once

#include "offline/record.hpp"
#include "offline/style.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::offline {

enum class SourceKind { kText, kDocument, kImageReference, kTranscript };

const char* source_kind_name(SourceKind k);
SourceKind parse_source_kind(std::string_view s);

struct RawMaterial {
  SourceKind kind = SourceKind::kText;
  std::string content;  // text, or an image path for kImageReference
  Origin origin = Origin::kUser;
};

struct IngestedMaterial {
  SourceKind kind = SourceKind::kText;
  Origin origin = Origin::kUser;
  std::string text;                      // whitespace collapsed to single spaces; empty for images
  std::vector<std::string> lines;        // non-empty normalized lines
  std::optional<std::string> reference;  // image path
};

// Validates UTF-8 and, for textual kinds, collapses whitespace. The line
// structure is kept separately since field markers are line-based.
IngestedMaterial ingest(const RawMaterial& material);

// Backend integration into the five-field record. Field candidates are
// merged with user material taking precedence over external retrieval; a
// losing external value is kept as a provenance note.
ProductRecord integrate(const std::string& product_id, const std::vector<RawMaterial>& materials,
                        const std::vector<std::string>& external_snippets,
                        backend::ModelBackend& backend);

// Merges a backend integration reply; exposed for tests. Throws
// kIntegration with the raw reply attached when it does not fit the schema.
ProductRecord merge_integration_output(const std::string& product_id, const std::string& raw);

struct Copy {
  std::string product_id;
  CopyStyle style = CopyStyle::kGeneral;
  std::string body;
  std::vector<std::string> interaction_phrases;
};

Copy generate_copy(const ProductRecord& record, CopyStyle style, backend::ModelBackend& backend);
Copy generate_copy(const ProductRecord& record, std::string_view style, backend::ModelBackend& backend);
Copy adapt_style(const ProductRecord& record, const std::string& exemplar,
                 backend::ModelBackend& backend);

} // namespace streamcart::offline
