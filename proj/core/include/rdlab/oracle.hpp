#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rdlab/time.hpp"

namespace rdlab {

struct Violation {
  int flat_bank = 0;
  std::int64_t aggressor = 0;
  std::int64_t victim = 0;
  std::uint32_t exposure = 0;
  Ps t = 0;
};

// Victim-centric exposure tracking: for every victim row, the number of
// activations each nearby aggressor has issued since that victim was last
// refreshed. Knows nothing about the mitigation in use.
class SafetyOracle {
 public:
  static constexpr int kMaxRadius = 4;

  SafetyOracle(std::int64_t rows_per_bank, int blast_radius, std::uint32_t nrh);

  void on_activate(int flat_bank, std::int64_t row, Ps t);
  void on_refresh(int flat_bank, std::int64_t row);

  // Largest exposure any victim currently has from this aggressor.
  std::uint32_t exposure_of(int flat_bank, std::int64_t aggressor) const;

  std::uint32_t max_exposure() const { return max_; }
  std::uint64_t violation_count() const { return violation_count_; }
  const std::vector<Violation>& violations() const { return violations_; }
  std::uint64_t activations() const { return activations_; }
  std::uint32_t nrh() const { return nrh_; }
  bool clean() const { return violation_count_ == 0; }

 private:
  using Slots = std::array<std::uint32_t, 2 * kMaxRadius>;

  static std::uint64_t key(int flat_bank, std::int64_t row) {
    return (static_cast<std::uint64_t>(flat_bank) << 40) | static_cast<std::uint64_t>(row);
  }
  int slot(std::int64_t delta) const {
    return delta < 0 ? static_cast<int>(delta + radius_) : static_cast<int>(delta + radius_ - 1);
  }

  std::int64_t rows_;
  int radius_;
  std::uint32_t nrh_;
  std::unordered_map<std::uint64_t, Slots> exposure_;
  std::uint32_t max_ = 0;
  std::uint64_t violation_count_ = 0;
  std::uint64_t activations_ = 0;
  std::vector<Violation> violations_;
};

}  // namespace rdlab
