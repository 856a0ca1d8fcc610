#pragma once

#include <string>
#include <string_view>

namespace streamcart::offline {

enum class CopyStyle { kLiterary, kProfessional, kGeneral };

const char* style_name(CopyStyle s);
// Throws kValidation for anything outside the three styles.
CopyStyle parse_style(std::string_view s);

} // namespace streamcart::offline
