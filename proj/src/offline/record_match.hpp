#pragma once

#include "offline/record.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace streamcart::offline {

struct FieldHit {
  std::string field;  // "name", "price", "specifications", "key_features", "service_details"
  std::string value;  // rendered value, e.g. "battery: 12 h"
};

// Record fields that share a (stemmed, stopword-free) keyword with the
// question. Name and price also answer to generic cue words ("called",
// "cost", ...), service details to after-sales cue words.
std::vector<FieldHit> match_record_fields(std::string_view question, const ProductRecord& record);

bool shares_keyword(std::string_view a, std::string_view b);

} // namespace streamcart::offline
