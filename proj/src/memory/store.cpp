#include "memory/store.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>

namespace streamcart::memory {

MemoryStore::MemoryStore() : entries_(std::make_shared<const std::vector<MemoryEntry>>()) {}

void MemoryStore::append(MemoryEntry entry) {
  const auto& seg = entry.segment;
  if (seg.start_frame > seg.end_frame)
    fail(ErrorCode::kValidation, "memory entry has start_frame after end_frame");
  std::lock_guard writer(writer_mu_);
  const auto current = snapshot().entries;
  if (!current->empty() && seg.start_frame <= current->back().segment.end_frame) {
    fail(ErrorCode::kValidation, "memory entry [" + std::to_string(seg.start_frame) + ", " +
                                     std::to_string(seg.end_frame) + "] overlaps or precedes [" +
                                     std::to_string(current->back().segment.start_frame) + ", " +
                                     std::to_string(current->back().segment.end_frame) + "]");
  }
  auto next = std::make_shared<std::vector<MemoryEntry>>(*current);
  next->push_back(std::move(entry));
  std::lock_guard guard(mu_);
  entries_ = std::move(next);
}

MemoryStore::Snapshot MemoryStore::snapshot() const {
  std::lock_guard guard(mu_);
  return {entries_, entries_->size()};
}

std::vector<MemoryEntry> recent_of(const std::vector<MemoryEntry>& entries, size_t k) {
  const size_t n = std::min(k, entries.size());
  return {entries.end() - static_cast<std::ptrdiff_t>(n), entries.end()};
}

std::vector<MemoryEntry> MemoryStore::recent(size_t k) const { return recent_of(*snapshot().entries, k); }

std::vector<MemoryEntry> MemoryStore::range(double t0, double t1) const {
  if (t0 > t1) fail(ErrorCode::kValidation, "range requires t0 <= t1");
  std::vector<MemoryEntry> out;
  for (const auto& e : *snapshot().entries) {
    if (e.segment.end_time >= t0 && e.segment.start_time <= t1) out.push_back(e);
  }
  return out;
}

std::optional<MemoryEntry> MemoryStore::last() const {
  const auto snap = snapshot();
  if (snap.entries->empty()) return std::nullopt;
  return snap.entries->back();
}

size_t MemoryStore::size() const { return snapshot().entries->size(); }

void MemoryStore::dump(std::ostream& out) const {
  for (const auto& e : *snapshot().entries) out << nlohmann::json(e).dump() << "\n";
}

void MemoryStore::restore(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    MemoryEntry e;
    try {
      e = nlohmann::json::parse(line).get<MemoryEntry>();
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::kParse, "memory dump line " + std::to_string(line_no) + ": " + ex.what());
    }
    append(std::move(e));
  }
}

} // namespace streamcart::memory
