#include "rdlab/oracle.hpp"

#include <algorithm>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {
constexpr std::size_t kKeptViolations = 64;
}

SafetyOracle::SafetyOracle(std::int64_t rows_per_bank, int blast_radius, std::uint32_t nrh)
    : rows_(rows_per_bank), radius_(blast_radius), nrh_(nrh) {
  if (blast_radius < 1 || blast_radius > kMaxRadius) throw ConfigError("blast radius out of range");
  if (nrh < 1) throw ConfigError("N_RH must be >= 1");
}

void SafetyOracle::on_activate(int flat_bank, std::int64_t row, Ps t) {
  ++activations_;
  for (int d = -radius_; d <= radius_; ++d) {
    if (d == 0) continue;
    const std::int64_t v = row + d;
    if (v < 0 || v >= rows_) continue;
    Slots& s = exposure_[key(flat_bank, v)];
    const std::uint32_t e = ++s[slot(row - v)];
    if (e > max_) max_ = e;
    if (e == nrh_) {
      ++violation_count_;
      if (violations_.size() < kKeptViolations) {
        violations_.push_back(Violation{flat_bank, row, v, e, t});
      }
    }
  }
}

void SafetyOracle::on_refresh(int flat_bank, std::int64_t row) {
  exposure_.erase(key(flat_bank, row));
}

std::uint32_t SafetyOracle::exposure_of(int flat_bank, std::int64_t aggressor) const {
  std::uint32_t best = 0;
  for (int d = -radius_; d <= radius_; ++d) {
    if (d == 0) continue;
    const std::int64_t v = aggressor + d;
    if (v < 0 || v >= rows_) continue;
    auto it = exposure_.find(key(flat_bank, v));
    if (it == exposure_.end()) continue;
    best = std::max(best, it->second[slot(aggressor - v)]);
  }
  return best;
}

}  // namespace rdlab
