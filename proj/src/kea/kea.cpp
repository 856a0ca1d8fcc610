#include "kea/kea.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace streamcart::kea {

void KeaConfig::validate() const {
  if (delta < 1) fail(ErrorCode::kValidation, "delta must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail(ErrorCode::kValidation, "alpha must be >= 0");
  if (!std::isfinite(beta)) fail(ErrorCode::kValidation, "beta must be finite");
}

double trailing_mean(std::span<const TokenScore> scores, size_t z, int delta) {
  if (delta < 1) fail(ErrorCode::kPrecondition, "delta must be >= 1");
  const auto d = static_cast<size_t>(delta);
  if (z <= d) fail(ErrorCode::kPrecondition, "trailing_mean: z - delta < 1");
  if (z > scores.size()) fail(ErrorCode::kPrecondition, "trailing_mean: z beyond caption length");
  double sum = 0.0;
  for (size_t p = z - d; p <= z - 1; ++p) sum += scores[p - 1].log_prob;
  return sum / static_cast<double>(d);
}

double dynamic_threshold(double mu, double alpha, double beta) {
  return std::max(alpha * mu, beta);
}

TruncationResult find_truncation(std::span<const TokenScore> scores, const KeaConfig& config) {
  config.validate();
  const size_t len = scores.size();
  if (len < 2) fail(ErrorCode::kValidation, "caption must have at least 2 tokens");
  for (size_t k = 0; k < len; ++k) {
    if (scores[k].position != k + 1) {
      fail(ErrorCode::kValidation, "token positions must be contiguous from 1 (position " +
                                       std::to_string(scores[k].position) + " at slot " +
                                       std::to_string(k + 1) + ")");
    }
  }

  TruncationResult r;
  r.prefix_len = len;
  const auto d = static_cast<size_t>(config.delta);
  for (size_t z = d + 1; z + 1 <= len; ++z) {
    const double mu = trailing_mean(scores, z, config.delta);
    if (mu - scores[z - 1].log_prob > dynamic_threshold(mu, config.alpha, config.beta)) {
      r.index = z;
      r.prefix_len = z - 1;
      break;
    }
  }
  return r;
}

std::vector<TokenScore> scores_from_log_probs(std::span<const double> log_probs) {
  std::vector<TokenScore> out;
  out.reserve(log_probs.size());
  for (size_t k = 0; k < log_probs.size(); ++k) out.push_back({k + 1, {}, log_probs[k]});
  return out;
}

std::vector<std::string> build_prefix(std::span<const std::string> caption_tokens,
                                      const TruncationResult& result) {
  const size_t n = std::min(result.prefix_len, caption_tokens.size());
  return {caption_tokens.begin(), caption_tokens.begin() + static_cast<std::ptrdiff_t>(n)};
}

// ---------------------------------------------------------------------------

TraceFile read_trace_file(std::istream& in) {
  TraceFile trace;
  std::string line;
  size_t line_no = 0;
  std::optional<size_t> declared_len;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("#kea-trace", 0) != 0)
        fail(ErrorCode::kParse, "line 1: missing '#kea-trace' header");
      for (const auto& tok : text::split_whitespace(line.substr(10))) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "caption_id") trace.caption_id = val;
        if (key == "length") {
          size_t v = 0;
          auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
          if (ec != std::errc() || p != val.data() + val.size())
            fail(ErrorCode::kParse, "line 1: bad length");
          declared_len = v;
        }
      }
      header_seen = true;
      continue;
    }
    if (text::trim(line).empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    TokenScore s;
    const std::string pos = text::trim(line.substr(0, t1));
    const std::string lp = text::trim(line.substr(t2 + 1));
    auto [p1, e1] = std::from_chars(pos.data(), pos.data() + pos.size(), s.position);
    auto [p2, e2] = std::from_chars(lp.data(), lp.data() + lp.size(), s.log_prob);
    if (e1 != std::errc() || p1 != pos.data() + pos.size() || e2 != std::errc() ||
        p2 != lp.data() + lp.size() || pos.empty() || lp.empty()) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad position or log_prob");
    }
    s.token_text = line.substr(t1 + 1, t2 - t1 - 1);
    trace.scores.push_back(std::move(s));
  }
  if (!header_seen) fail(ErrorCode::kParse, "empty trace file");
  if (declared_len && *declared_len != trace.scores.size()) {
    fail(ErrorCode::kValidation, "header length " + std::to_string(*declared_len) +
                                     " does not match " + std::to_string(trace.scores.size()) +
                                     " token lines");
  }
  return trace;
}

TraceFile read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open trace file: " + path);
  return read_trace_file(in);
}

void write_trace_file(std::ostream& out, const TraceFile& trace) {
  out << "#kea-trace caption_id=" << (trace.caption_id.empty() ? "-" : trace.caption_id)
      << " length=" << trace.scores.size() << "\n";
  char buf[64];
  for (const auto& s : trace.scores) {
    std::snprintf(buf, sizeof buf, "%.17g", s.log_prob);
    out << s.position << '\t' << s.token_text << '\t' << buf << "\n";
  }
}

} // namespace streamcart::kea
