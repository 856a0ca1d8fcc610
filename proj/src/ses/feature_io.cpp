#include "ses/feature_io.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace streamcart::ses {

namespace {

template <typename T>
T parse_number(std::string_view s, size_t line_no, const char* field) {
  const std::string trimmed = text::trim(s);
  T value{};
  const char* b = trimmed.data();
  const char* e = b + trimmed.size();
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || trimmed.empty()) {
    fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad " + field + " '" +
                                trimmed + "'");
  }
  return value;
}

} // namespace

FrameFeature parse_feature_line(const std::string& line, size_t line_no) {
  std::vector<std::string_view> cols;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(',');
    cols.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (cols.size() != 4) {
    fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                std::to_string(cols.size()));
  }
  FrameFeature f;
  f.frame_id = parse_number<int64_t>(cols[0], line_no, "frame_id");
  f.timestamp = parse_number<double>(cols[1], line_no, "timestamp");
  f.vit_similarity = parse_number<double>(cols[2], line_no, "vit_similarity");
  f.flow_magnitude = parse_number<double>(cols[3], line_no, "flow_magnitude");
  try {
    validate_feature(f);
  } catch (const Error& e) {
    fail(ErrorCode::kValidation, "line " + std::to_string(line_no) + ": " + e.what());
  }
  return f;
}

std::string format_feature_line(const FrameFeature& f) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g", static_cast<long long>(f.frame_id),
                f.timestamp, f.vit_similarity, f.flow_magnitude);
  return buf;
}

FeatureFile read_feature_file(std::istream& in) {
  FeatureFile file;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("#ses-features", 0) != 0)
        fail(ErrorCode::kParse, "line 1: missing '#ses-features' header");
      for (const auto& tok : text::split_whitespace(line.substr(13))) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        file.header[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      const auto it = file.header.find("version");
      if (it == file.header.end()) fail(ErrorCode::kParse, "line 1: header lacks version");
      file.version = parse_number<int>(it->second, 1, "version");
      if (file.version != kFeatureSchemaVersion) {
        fail(ErrorCode::kMigration,
             "unsupported feature schema version " + std::to_string(file.version));
      }
      header_seen = true;
      continue;
    }
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#' || t.rfind("frame_id", 0) == 0) continue;
    file.frames.push_back(parse_feature_line(t, line_no));
  }
  if (!header_seen) fail(ErrorCode::kParse, "empty feature file");
  return file;
}

FeatureFile read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open feature file: " + path);
  return read_feature_file(in);
}

void write_feature_file(std::ostream& out, const std::vector<FrameFeature>& frames,
                        const std::string& flow_normalization) {
  out << "#ses-features version=" << kFeatureSchemaVersion
      << " flow_normalization=" << (flow_normalization.empty() ? "unspecified" : flow_normalization)
      << "\n";
  out << "frame_id,timestamp,vit_similarity,flow_magnitude\n";
  for (const auto& f : frames) out << format_feature_line(f) << "\n";
}

} // namespace streamcart::ses
