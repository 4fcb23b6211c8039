#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdlab/time.hpp"

namespace rdlab {

struct AttEntry {
  std::int64_t row = 0;
  std::uint32_t count = 0;
  Ps updated = 0;
};

// Aggressor Tracking Table: a handful of the highest-count recently
// precharged rows of one bank.
class AggressorTrackingTable {
 public:
  explicit AggressorTrackingTable(int capacity = 4);

  // Present -> update; free slot -> insert; otherwise replace the minimum
  // entry when count strictly exceeds it. Returns true when the row is tracked
  // afterwards.
  bool update(std::int64_t row, std::uint32_t count, Ps t = 0);

  // Maximum count, ties to the lowest row index.
  std::optional<AttEntry> max_entry() const;
  std::optional<AttEntry> max_entry_since(Ps since) const;
  std::optional<AttEntry> max_entry_at_least(std::uint32_t threshold) const;
  bool any_at_least(std::uint32_t threshold) const;

  bool remove(std::int64_t row);
  bool contains(std::int64_t row) const;
  std::optional<std::uint32_t> count_of(std::int64_t row) const;
  void clear();

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(slots_.size()); }
  const std::vector<AttEntry>& entries() const { return slots_; }

 private:
  int capacity_;
  std::vector<AttEntry> slots_;
};

}  // namespace rdlab
