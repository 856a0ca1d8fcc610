#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace streamcart::offline {

enum class Origin { kUser, kExternal };

const char* origin_name(Origin o);
Origin parse_origin(std::string_view s);

struct SpecEntry {
  std::string key;
  std::string value;
  bool operator==(const SpecEntry&) const = default;
};

// Which source supplied a field; `note` records values that lost a conflict.
struct ProvenanceEntry {
  std::string field;
  Origin origin = Origin::kUser;
  std::string note;
  bool operator==(const ProvenanceEntry&) const = default;
};

struct ProductRecord {
  std::string product_id;
  std::string name;
  std::string price;
  std::vector<SpecEntry> specifications;
  std::vector<std::string> key_features;
  std::vector<std::string> service_details;
  std::vector<ProvenanceEntry> provenance;

  void validate() const;
  bool operator==(const ProductRecord&) const = default;
};

inline constexpr int kRecordSchemaVersion = 1;

void to_json(nlohmann::json& j, const ProductRecord& r);
void from_json(const nlohmann::json& j, ProductRecord& r);

// Parses a record document, checking schema_version.
ProductRecord record_from_document(const nlohmann::json& doc);

} // namespace streamcart::offline
