#pragma once

#include "ses/ses.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace streamcart::ses {

// Feature stream file:
//   #ses-features version=1 flow_normalization=<how flow was scaled to [0,1]>
//   frame_id,timestamp,vit_similarity,flow_magnitude
//   ...
struct FeatureFile {
  int version = 1;
  std::map<std::string, std::string> header;
  std::vector<FrameFeature> frames;
};

inline constexpr int kFeatureSchemaVersion = 1;

FeatureFile read_feature_file(std::istream& in);
FeatureFile read_feature_file(const std::string& path);

void write_feature_file(std::ostream& out, const std::vector<FrameFeature>& frames,
                        const std::string& flow_normalization);

// Parses one data line; throws kParse naming the line number.
FrameFeature parse_feature_line(const std::string& line, size_t line_no);

std::string format_feature_line(const FrameFeature& f);

} // namespace streamcart::ses
