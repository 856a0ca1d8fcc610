#pragma once

// Reference implementations written straight from the definitions, kept
// deliberately naive. Tests compare the engine against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

struct Frame {
  double vit;
  double flow;
};

inline double fuse(double vit, double flow, double gamma) { return gamma * vit + (1.0 - gamma) * flow; }

// All positions of w that are >= every neighbour present in w.
inline std::vector<size_t> local_maxima(const std::vector<double>& w) {
  std::vector<size_t> out;
  for (size_t j = 0; j < w.size(); ++j) {
    bool ok = true;
    if (j >= 1 && w[j - 1] > w[j]) ok = false;
    if (j + 1 < w.size() && w[j + 1] > w[j]) ok = false;
    if (ok) out.push_back(j);
  }
  return out;
}

struct Depth {
  double left, right, depth;
};

inline Depth depth(const std::vector<double>& w, size_t i) {
  const auto peaks = local_maxima(w);
  double left = w.front(), right = w.back();
  size_t best_l = SIZE_MAX, best_r = SIZE_MAX;
  for (size_t p : peaks) {
    if (p < i && (best_l == SIZE_MAX || i - p < i - best_l)) best_l = p;
    if (p > i && (best_r == SIZE_MAX || p - i < best_r - i)) best_r = p;
  }
  if (best_l != SIZE_MAX) left = w[best_l];
  if (best_r != SIZE_MAX) right = w[best_r];
  return {left, right, (left + right - 2.0 * w[i]) / 2.0};
}

inline std::pair<double, double> mean_var(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  long double s = 0;
  for (double x : xs) s += x;
  const long double m = s / xs.size();
  long double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return {static_cast<double>(m), static_cast<double>(v / xs.size())};
}

struct SesParams {
  double gamma = 0.5;
  double alpha = 1.0;
  int window = 64;
  int min_len = 8;
  int warmup = 64;
};

// Boundary frame indices for a complete signal.
inline std::vector<int64_t> boundaries(const std::vector<Frame>& frames, const SesParams& p) {
  const int64_t n = static_cast<int64_t>(frames.size());
  std::vector<double> c(frames.size());
  for (int64_t k = 0; k < n; ++k)
    c[k] = k == 0 ? fuse(1.0, 0.0, p.gamma) : fuse(frames[k].vit, frames[k].flow, p.gamma);
  const int64_t reach = p.window / 2;
  std::vector<double> d(frames.size());
  for (int64_t i = 0; i < n; ++i) {
    const int64_t lo = std::max<int64_t>(0, i - reach), hi = std::min<int64_t>(n - 1, i + reach);
    std::vector<double> w(c.begin() + lo, c.begin() + hi + 1);
    d[i] = depth(w, static_cast<size_t>(i - lo)).depth;
  }
  std::vector<int64_t> out;
  int64_t start = 0;
  for (int64_t i = 0; i < n; ++i) {
    const int64_t from = std::max<int64_t>(0, i - p.window + 1);
    std::vector<double> trail(d.begin() + from, d.begin() + i + 1);
    const auto [m, v] = mean_var(trail);
    const bool over = d[i] > 0.0 && d[i] > m + p.alpha * std::sqrt(v);
    const int64_t seen = std::min<int64_t>(n, i + reach + 1);
    if (over && i - start >= p.min_len && seen >= p.warmup) {
      out.push_back(i);
      start = i;
    }
  }
  return out;
}

// Exhaustive scan for the first qualifying truncation index (1-based).
inline std::optional<size_t> truncation(const std::vector<double>& lp, int delta, double alpha, double beta) {
  const size_t L = lp.size();
  for (size_t z = static_cast<size_t>(delta) + 1; z + 1 <= L; ++z) {
    double sum = 0;
    for (size_t k = z - delta; k <= z - 1; ++k) sum += lp[k - 1];
    const double mu = sum / delta;
    if (mu - lp[z - 1] > std::max(alpha * mu, beta)) return z;
  }
  return std::nullopt;
}

} // namespace oracle
