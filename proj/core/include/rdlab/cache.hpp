#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace rdlab {

struct CacheConfig {
  std::uint64_t size_bytes = 8ull << 20;
  int ways = 8;
  int line_bytes = 64;
  bool enabled = true;

  void validate() const;
};

// Set-associative write-back, write-allocate LLC with true LRU.
class Cache {
 public:
  struct Outcome {
    bool hit = false;
    std::optional<std::uint64_t> writeback;
  };

  explicit Cache(const CacheConfig& config);

  bool probe(std::uint64_t address) const;
  // Whether a miss on this address would evict a dirty line.
  bool miss_evicts_dirty(std::uint64_t address) const;
  Outcome access(std::uint64_t address, bool is_write);

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t writebacks() const { return writebacks_; }

 private:
  struct Line {
    std::uint64_t tag = 0;
    std::uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };

  std::size_t set_of(std::uint64_t line) const { return static_cast<std::size_t>(line % sets_); }
  const Line* victim(std::size_t set) const;

  CacheConfig cfg_;
  std::uint64_t sets_;
  std::vector<Line> lines_;
  std::uint64_t clock_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t writebacks_ = 0;
};

}  // namespace rdlab
