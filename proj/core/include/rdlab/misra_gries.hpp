#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

namespace rdlab {

// Misra-Gries frequent-item summary with a spillover counter. Every entry's
// count is an upper bound on the key's true count and never more than
// spill() above it; a missing key has true count <= spill().
class MisraGriesTable {
 public:
  explicit MisraGriesTable(std::size_t capacity);

  // Records one occurrence and returns the key's estimate afterwards, or 0
  // when the key could not be inserted.
  std::uint64_t observe(std::uint64_t key);

  bool contains(std::uint64_t key) const { return counts_.count(key) != 0; }
  // Estimate for a tracked key, spill() for an untracked one.
  std::uint64_t estimate(std::uint64_t key) const;

  std::uint64_t spill() const { return spill_; }
  std::uint64_t stream_length() const { return stream_; }
  std::size_t size() const { return counts_.size(); }
  std::size_t capacity() const { return capacity_; }
  void clear();

 private:
  void move_bucket(std::uint64_t key, std::uint64_t from, std::uint64_t to);

  std::size_t capacity_;
  std::uint64_t spill_ = 0;
  std::uint64_t stream_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::map<std::uint64_t, std::set<std::uint64_t>> buckets_;
};

}  // namespace rdlab
