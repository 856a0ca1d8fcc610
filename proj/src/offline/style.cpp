#include "offline/style.hpp"

#include "common/error.hpp"

namespace streamcart::offline {

const char* style_name(CopyStyle s) {
  switch (s) {
  case CopyStyle::kLiterary: return "literary";
  case CopyStyle::kProfessional: return "professional";
  case CopyStyle::kGeneral: return "general";
  }
  return "general";
}

CopyStyle parse_style(std::string_view s) {
  if (s == "literary") return CopyStyle::kLiterary;
  if (s == "professional") return CopyStyle::kProfessional;
  if (s == "general") return CopyStyle::kGeneral;
  fail(ErrorCode::kValidation,
       "style must be literary, professional or general (got '" + std::string(s) + "')");
}

} // namespace streamcart::offline
