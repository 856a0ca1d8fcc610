#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamcart::kea {

struct TokenScore {
  size_t position = 0;  // 1-based
  std::string token_text;
  double log_prob = 0.0;
};

struct KeaConfig {
  int delta = 5;
  double alpha = 1.0;
  double beta = 0.8;

  void validate() const;
};

struct TruncationResult {
  std::optional<size_t> index;  // 1-based truncation point o
  size_t prefix_len = 0;        // o - 1, or the full caption length
};

// Mean log-probability of positions [z - delta, z - 1] (1-based).
double trailing_mean(std::span<const TokenScore> scores, size_t z, int delta);

double dynamic_threshold(double mu, double alpha, double beta);

// First z in [delta + 1, L - 1] whose confidence drops below the trailing
// mean by more than max(alpha * mean, beta). No qualifying z means the whole
// caption is reused.
TruncationResult find_truncation(std::span<const TokenScore> scores, const KeaConfig& config);

// Convenience for bare log-probability sequences (positions 1..n).
std::vector<TokenScore> scores_from_log_probs(std::span<const double> log_probs);

std::vector<std::string> build_prefix(std::span<const std::string> caption_tokens,
                                      const TruncationResult& result);

// Token-trace file:
//   #kea-trace caption_id=<id> length=<L>
//   <position>\t<token_text>\t<log_prob>
struct TraceFile {
  std::string caption_id;
  std::vector<TokenScore> scores;
};

TraceFile read_trace_file(std::istream& in);
TraceFile read_trace_file(const std::string& path);
void write_trace_file(std::ostream& out, const TraceFile& trace);

} // namespace streamcart::kea
