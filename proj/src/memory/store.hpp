#pragma once

#include "memory/entry.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace streamcart::backend {
class ModelBackend;
}

namespace streamcart::memory {

inline constexpr size_t kDefaultRecent = 5;

// Append-only, copy-on-write entry list. Readers grab an immutable snapshot
// under a short lock; the writer builds the next list outside it.
class MemoryStore {
public:
  struct Snapshot {
    std::shared_ptr<const std::vector<MemoryEntry>> entries;
    uint64_t version = 0;  // equals entries->size()
  };

  MemoryStore();

  // Throws kValidation if the segment does not start after the last one ends.
  void append(MemoryEntry entry);

  Snapshot snapshot() const;
  std::vector<MemoryEntry> recent(size_t k = kDefaultRecent) const;
  // Entries whose [start_time, end_time] intersects [t0, t1].
  std::vector<MemoryEntry> range(double t0, double t1) const;
  std::optional<MemoryEntry> last() const;
  size_t size() const;

  // One JSON object per line.
  void dump(std::ostream& out) const;
  void restore(std::istream& in);

private:
  mutable std::mutex mu_;
  std::shared_ptr<const std::vector<MemoryEntry>> entries_;
  std::mutex writer_mu_;
};

std::vector<MemoryEntry> recent_of(const std::vector<MemoryEntry>& entries, size_t k);

} // namespace streamcart::memory
