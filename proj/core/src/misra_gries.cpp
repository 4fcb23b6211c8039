#include "rdlab/misra_gries.hpp"

#include "rdlab/errors.hpp"

namespace rdlab {

MisraGriesTable::MisraGriesTable(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("Misra-Gries capacity must be >= 1");
}

void MisraGriesTable::move_bucket(std::uint64_t key, std::uint64_t from, std::uint64_t to) {
  auto it = buckets_.find(from);
  it->second.erase(key);
  if (it->second.empty()) buckets_.erase(it);
  buckets_[to].insert(key);
}

std::uint64_t MisraGriesTable::observe(std::uint64_t key) {
  ++stream_;
  auto it = counts_.find(key);
  if (it != counts_.end()) {
    const std::uint64_t old = it->second++;
    move_bucket(key, old, it->second);
    return it->second;
  }
  if (counts_.size() < capacity_) {
    const std::uint64_t c = spill_ + 1;
    counts_.emplace(key, c);
    buckets_[c].insert(key);
    return c;
  }
  // All counts are >= spill; an entry sitting exactly at spill can be reused.
  auto low = buckets_.begin();
  if (low->first == spill_) {
    const std::uint64_t evicted = *low->second.begin();
    low->second.erase(low->second.begin());
    if (low->second.empty()) buckets_.erase(low);
    counts_.erase(evicted);
    const std::uint64_t c = spill_ + 1;
    counts_.emplace(key, c);
    buckets_[c].insert(key);
    return c;
  }
  ++spill_;
  return 0;
}

std::uint64_t MisraGriesTable::estimate(std::uint64_t key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? spill_ : it->second;
}

void MisraGriesTable::clear() {
  counts_.clear();
  buckets_.clear();
  spill_ = 0;
  stream_ = 0;
}

}  // namespace rdlab
