#include "offline/pipeline.hpp"

#include "backend/backend.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace streamcart::offline {

namespace {

constexpr const char* kFields[] = {"name", "price", "specifications", "key_features",
                                   "service_details"};

struct Candidate {
  std::string value;
  Origin origin;
};

[[noreturn]] void bad_output(const std::string& why, const std::string& raw) {
  fail(ErrorCode::kIntegration, "integration output rejected (" + why + "); raw output: " + raw);
}

std::vector<Candidate> candidates(const nlohmann::json& doc, const char* field, const std::string& raw) {
  std::vector<Candidate> out;
  if (!doc.contains(field)) return out;
  const auto& list = doc[field];
  if (!list.is_array()) bad_output(std::string(field) + " is not a list", raw);
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("value") || !item["value"].is_string())
      bad_output(std::string(field) + " entries need a string value", raw);
    Origin origin = Origin::kUser;
    if (item.contains("origin")) {
      if (!item["origin"].is_string()) bad_output("origin must be a string", raw);
      try {
        origin = parse_origin(item["origin"].get<std::string>());
      } catch (const Error&) {
        bad_output("unknown origin in " + std::string(field), raw);
      }
    }
    const std::string value = text::normalize_whitespace(item["value"].get<std::string>());
    if (!value.empty()) out.push_back({value, origin});
  }
  // User-supplied candidates first; stable keeps source order within an origin.
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.origin == Origin::kUser && b.origin != Origin::kUser;
  });
  return out;
}

// Single-valued field: the first candidate wins, other distinct values are
// noted as conflicts.
std::string pick_single(const std::vector<Candidate>& cands, const char* field,
                        std::vector<ProvenanceEntry>& provenance) {
  if (cands.empty()) return {};
  std::vector<std::string> losers;
  for (size_t i = 1; i < cands.size(); ++i) {
    if (cands[i].value != cands[0].value &&
        std::find(losers.begin(), losers.end(), cands[i].value) == losers.end()) {
      losers.push_back(cands[i].value);
    }
  }
  std::string note;
  if (!losers.empty()) note = "conflict: overrides " + text::join(losers, " | ");
  provenance.push_back({field, cands[0].origin, note});
  return cands[0].value;
}

void record_list_origins(const std::vector<Candidate>& kept, const char* field,
                         std::vector<ProvenanceEntry>& provenance) {
  bool user = false;
  bool external = false;
  for (const auto& c : kept) (c.origin == Origin::kUser ? user : external) = true;
  if (user) provenance.push_back({field, Origin::kUser, ""});
  if (external) provenance.push_back({field, Origin::kExternal, ""});
}

std::vector<Candidate> dedup(const std::vector<Candidate>& cands) {
  std::vector<Candidate> kept;
  for (const auto& c : cands) {
    const bool seen = std::any_of(kept.begin(), kept.end(),
                                  [&](const Candidate& k) { return k.value == c.value; });
    if (!seen) kept.push_back(c);
  }
  return kept;
}

} // namespace

const char* source_kind_name(SourceKind k) {
  switch (k) {
  case SourceKind::kText: return "text";
  case SourceKind::kDocument: return "pre-extracted-document";
  case SourceKind::kImageReference: return "image-reference";
  case SourceKind::kTranscript: return "transcript";
  }
  return "text";
}

SourceKind parse_source_kind(std::string_view s) {
  if (s == "text") return SourceKind::kText;
  if (s == "pre-extracted-document" || s == "document") return SourceKind::kDocument;
  if (s == "image-reference" || s == "image") return SourceKind::kImageReference;
  if (s == "transcript") return SourceKind::kTranscript;
  fail(ErrorCode::kValidation, "unknown source_kind '" + std::string(s) + "'");
}

IngestedMaterial ingest(const RawMaterial& material) {
  if (!text::is_valid_utf8(material.content))
    fail(ErrorCode::kValidation, std::string("ingestion: ") + source_kind_name(material.kind) +
                                     " content is not valid UTF-8");
  IngestedMaterial out;
  out.kind = material.kind;
  out.origin = material.origin;
  if (material.kind == SourceKind::kImageReference) {
    const auto ref = text::trim(material.content);
    if (ref.empty()) fail(ErrorCode::kValidation, "ingestion: image reference is empty");
    out.reference = ref;
    return out;
  }
  std::vector<std::string> lines;
  std::string_view rest(material.content);
  while (true) {
    const auto nl = rest.find('\n');
    auto line = text::normalize_whitespace(rest.substr(0, nl));
    if (!line.empty()) lines.push_back(std::move(line));
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  if (lines.empty())
    fail(ErrorCode::kValidation, std::string("ingestion: ") + source_kind_name(material.kind) +
                                     " content is empty");
  out.text = text::join(lines, " ");
  out.lines = std::move(lines);
  return out;
}

ProductRecord merge_integration_output(const std::string& product_id, const std::string& raw) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    bad_output("not JSON", raw);
  }
  if (!doc.is_object()) bad_output("not a JSON object", raw);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::none_of(std::begin(kFields), std::end(kFields), [&](const char* f) { return it.key() == f; }))
      bad_output("unexpected key '" + it.key() + "'", raw);
  }

  ProductRecord r;
  r.product_id = product_id;
  r.name = pick_single(candidates(doc, "name", raw), "name", r.provenance);
  r.price = pick_single(candidates(doc, "price", raw), "price", r.provenance);

  // Specifications are "key: value"; conflicting values per key resolve like
  // single-valued fields.
  const auto specs = candidates(doc, "specifications", raw);
  std::vector<std::string> keys;
  std::vector<std::vector<Candidate>> by_key;
  for (const auto& c : specs) {
    const auto colon = c.value.find(':');
    if (colon == std::string::npos) bad_output("specification '" + c.value + "' lacks 'key: value'", raw);
    const auto key = text::trim(c.value.substr(0, colon));
    const auto value = text::trim(c.value.substr(colon + 1));
    if (key.empty()) bad_output("specification with an empty key", raw);
    const auto pos = std::find(keys.begin(), keys.end(), key);
    if (pos == keys.end()) {
      keys.push_back(key);
      by_key.push_back({{value, c.origin}});
    } else {
      by_key[static_cast<size_t>(pos - keys.begin())].push_back({value, c.origin});
    }
  }
  for (size_t i = 0; i < keys.size(); ++i) {
    const auto value = pick_single(by_key[i], "specifications", r.provenance);
    r.provenance.back().field = "specifications." + keys[i];
    r.specifications.push_back({keys[i], value});
  }

  for (auto [field, target] : {std::pair{"key_features", &r.key_features},
                               std::pair{"service_details", &r.service_details}}) {
    const auto kept = dedup(candidates(doc, field, raw));
    for (const auto& c : kept) target->push_back(c.value);
    record_list_origins(kept, field, r.provenance);
  }

  if (r.name.empty()) bad_output("no product name", raw);
  r.validate();
  return r;
}

ProductRecord integrate(const std::string& product_id, const std::vector<RawMaterial>& materials,
                        const std::vector<std::string>& external_snippets,
                        backend::ModelBackend& backend) {
  if (product_id.empty()) fail(ErrorCode::kValidation, "product_id must be non-empty");
  if (materials.empty()) fail(ErrorCode::kValidation, "integration needs at least one material");
  backend::IntegrationRequest req;
  req.product_id = product_id;
  for (const auto& m : materials) {
    auto in = ingest(m);
    if (in.reference) continue;
    req.sources.push_back({in.origin, text::join(in.lines, "\n")});
  }
  for (const auto& s : external_snippets) {
    auto in = ingest({SourceKind::kText, s, Origin::kExternal});
    req.sources.push_back({Origin::kExternal, text::join(in.lines, "\n")});
  }
  if (req.sources.empty()) fail(ErrorCode::kValidation, "integration needs textual material");
  return merge_integration_output(product_id, backend.integrate(req));
}

Copy generate_copy(const ProductRecord& record, CopyStyle style, backend::ModelBackend& backend) {
  record.validate();
  auto reply = backend.write_copy({record, style, std::nullopt});
  return {record.product_id, style, std::move(reply.body), std::move(reply.interaction_phrases)};
}

Copy generate_copy(const ProductRecord& record, std::string_view style, backend::ModelBackend& backend) {
  return generate_copy(record, parse_style(style), backend);
}

Copy adapt_style(const ProductRecord& record, const std::string& exemplar,
                 backend::ModelBackend& backend) {
  if (text::trim(exemplar).empty()) fail(ErrorCode::kValidation, "style exemplar must be non-empty");
  record.validate();
  auto reply = backend.write_copy({record, CopyStyle::kGeneral, exemplar});
  return {record.product_id, CopyStyle::kGeneral, std::move(reply.body),
          std::move(reply.interaction_phrases)};
}

} // namespace streamcart::offline
