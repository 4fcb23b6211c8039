#include "rdlab/cache.hpp"

#include "rdlab/errors.hpp"

namespace rdlab {

void CacheConfig::validate() const {
  if (ways < 1 || line_bytes < 1) throw ConfigError("cache ways and line size must be positive");
  if (size_bytes % (static_cast<std::uint64_t>(ways) * line_bytes) != 0 || size_bytes == 0)
    throw ConfigError("cache size must be a positive multiple of ways * line size");
}

Cache::Cache(const CacheConfig& config) : cfg_(config) {
  config.validate();
  sets_ = config.size_bytes / (static_cast<std::uint64_t>(config.ways) * config.line_bytes);
  lines_.resize(sets_ * config.ways);
}

bool Cache::probe(std::uint64_t address) const {
  const std::uint64_t line = address / cfg_.line_bytes;
  const Line* base = &lines_[set_of(line) * cfg_.ways];
  for (int w = 0; w < cfg_.ways; ++w) {
    if (base[w].valid && base[w].tag == line) return true;
  }
  return false;
}

const Cache::Line* Cache::victim(std::size_t set) const {
  const Line* base = &lines_[set * cfg_.ways];
  const Line* v = base;
  for (int w = 0; w < cfg_.ways; ++w) {
    if (!base[w].valid) return &base[w];
    if (base[w].stamp < v->stamp) v = &base[w];
  }
  return v;
}

bool Cache::miss_evicts_dirty(std::uint64_t address) const {
  const Line* v = victim(set_of(address / cfg_.line_bytes));
  return v->valid && v->dirty;
}

Cache::Outcome Cache::access(std::uint64_t address, bool is_write) {
  const std::uint64_t line = address / cfg_.line_bytes;
  const std::size_t set = set_of(line);
  Line* base = &lines_[set * cfg_.ways];
  ++clock_;
  for (int w = 0; w < cfg_.ways; ++w) {
    if (base[w].valid && base[w].tag == line) {
      base[w].stamp = clock_;
      base[w].dirty = base[w].dirty || is_write;
      ++hits_;
      return {true, std::nullopt};
    }
  }
  ++misses_;
  Line* v = const_cast<Line*>(victim(set));
  Outcome out;
  if (v->valid && v->dirty) {
    out.writeback = v->tag * cfg_.line_bytes;
    ++writebacks_;
  }
  *v = Line{line, clock_, true, is_write};
  return out;
}

}  // namespace rdlab
