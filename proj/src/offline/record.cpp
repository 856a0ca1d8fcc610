#include "offline/record.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

namespace streamcart::offline {

const char* origin_name(Origin o) { return o == Origin::kUser ? "user" : "external-retrieval"; }

Origin parse_origin(std::string_view s) {
  if (s == "user") return Origin::kUser;
  if (s == "external-retrieval" || s == "external") return Origin::kExternal;
  fail(ErrorCode::kValidation, "unknown origin '" + std::string(s) + "'");
}

void ProductRecord::validate() const {
  if (product_id.empty()) fail(ErrorCode::kValidation, "product_id must be non-empty");
  if (name.empty()) fail(ErrorCode::kValidation, "product name must be non-empty");
  for (const auto& s : specifications) {
    if (s.key.empty()) fail(ErrorCode::kValidation, "specification key must be non-empty");
  }
}

void to_json(nlohmann::json& j, const ProductRecord& r) {
  auto specs = nlohmann::json::array();
  for (const auto& s : r.specifications) specs.push_back({{"key", s.key}, {"value", s.value}});
  auto prov = nlohmann::json::array();
  for (const auto& p : r.provenance) {
    nlohmann::json e{{"field", p.field}, {"origin", origin_name(p.origin)}};
    if (!p.note.empty()) e["note"] = p.note;
    prov.push_back(std::move(e));
  }
  j = nlohmann::json{{"schema_version", kRecordSchemaVersion},
                     {"product_id", r.product_id},
                     {"name", r.name},
                     {"price", r.price},
                     {"specifications", specs},
                     {"key_features", r.key_features},
                     {"service_details", r.service_details},
                     {"provenance", prov}};
}

void from_json(const nlohmann::json& j, ProductRecord& r) {
  r = ProductRecord{};
  r.product_id = j.at("product_id").get<std::string>();
  r.name = j.at("name").get<std::string>();
  r.price = j.value("price", std::string{});
  for (const auto& s : j.value("specifications", nlohmann::json::array()))
    r.specifications.push_back({s.at("key").get<std::string>(), s.at("value").get<std::string>()});
  r.key_features = j.value("key_features", std::vector<std::string>{});
  r.service_details = j.value("service_details", std::vector<std::string>{});
  for (const auto& p : j.value("provenance", nlohmann::json::array())) {
    r.provenance.push_back({p.at("field").get<std::string>(),
                            parse_origin(p.at("origin").get<std::string>()),
                            p.value("note", std::string{})});
  }
}

ProductRecord record_from_document(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "record document must be a JSON object");
  const int version = doc.value("schema_version", 0);
  if (version != kRecordSchemaVersion) {
    fail(ErrorCode::kMigration, "record schema_version " + std::to_string(version) +
                                    " is not supported (expected " +
                                    std::to_string(kRecordSchemaVersion) + ")");
  }
  try {
    auto r = doc.get<ProductRecord>();
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed record document: ") + e.what());
  }
}

} // namespace streamcart::offline
