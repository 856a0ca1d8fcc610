#include "offline/record_match.hpp"

#include "common/text.hpp"

#include <algorithm>
#include <array>

namespace streamcart::offline {

namespace {

constexpr std::array<std::string_view, 4> kNameCues = {"name", "called", "brand", "model"};
constexpr std::array<std::string_view, 7> kPriceCues = {"price", "cost", "expensive", "cheap",
                                                        "pay", "discount", "dollar"};
constexpr std::array<std::string_view, 11> kServiceCues = {
    "warranty", "return", "ship", "shipping", "delivery", "deliver",
    "refund",   "service", "guarantee", "exchange", "support"};

template <size_t N>
bool any_cue(const std::vector<std::string>& kw, const std::array<std::string_view, N>& cues) {
  for (auto cue : cues) {
    const auto st = text::stem(cue);
    if (std::find(kw.begin(), kw.end(), st) != kw.end()) return true;
  }
  return false;
}

bool overlaps(const std::vector<std::string>& kw, std::string_view field_text) {
  for (const auto& w : text::keywords(field_text)) {
    if (std::find(kw.begin(), kw.end(), w) != kw.end()) return true;
  }
  return false;
}

} // namespace

std::vector<FieldHit> match_record_fields(std::string_view question, const ProductRecord& r) {
  const auto kw = text::keywords(question);
  std::vector<FieldHit> hits;
  if (kw.empty()) return hits;

  if (!r.name.empty() && any_cue(kw, kNameCues)) hits.push_back({"name", r.name});
  const bool dollar = question.find('$') != std::string_view::npos;
  if (!r.price.empty() && (dollar || any_cue(kw, kPriceCues))) hits.push_back({"price", r.price});
  for (const auto& s : r.specifications) {
    if (overlaps(kw, s.key) || overlaps(kw, s.value))
      hits.push_back({"specifications", s.key + ": " + s.value});
  }
  for (const auto& f : r.key_features) {
    if (overlaps(kw, f)) hits.push_back({"key_features", f});
  }
  const bool service_cue = any_cue(kw, kServiceCues);
  for (const auto& s : r.service_details) {
    if (service_cue || overlaps(kw, s)) hits.push_back({"service_details", s});
  }
  return hits;
}

bool shares_keyword(std::string_view a, std::string_view b) {
  return overlaps(text::keywords(a), b);
}

} // namespace streamcart::offline
