#include "rdlab/storage.hpp"

#include <algorithm>
#include <bit>

namespace rdlab {

namespace {

// ABACuS per-entry metadata beyond the row id and its two counters; fitted to
// the published 8 KB / 324 KB endpoints.
constexpr int kAbacusMetaBits = 13;
constexpr int kChronusCounterBits = 8;

}  // namespace

int ceil_log2(std::uint64_t v) {
  if (v <= 1) return 0;
  return static_cast<int>(std::bit_width(v - 1));
}

std::uint64_t misra_gries_entries(std::uint32_t nrh, const TimingParams& timing) {
  const std::uint64_t w = act_budget_per_window(timing);
  const std::uint64_t threshold = std::max<std::uint32_t>(1, nrh / 2);
  return (w + threshold - 1) / threshold;
}

StorageBytes storage_model(Mechanism mechanism, std::uint32_t nrh, const DeviceGeometry& geometry,
                           const TimingParams& timing) {
  StorageBytes s;
  const double banks = geometry.banks_per_channel() * geometry.channels;
  const double rows = static_cast<double>(geometry.rows_per_bank);
  const int row_bits = ceil_log2(static_cast<std::uint64_t>(geometry.rows_per_bank));
  const std::uint32_t half = std::max<std::uint32_t>(1, nrh / 2);

  switch (mechanism) {
    case Mechanism::None:
    case Mechanism::PARA:
      break;
    case Mechanism::PRFM:
      s.cpu_sram = banks * ceil_log2(std::uint64_t{nrh} + 1) / 8.0;
      break;
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
    case Mechanism::Chronus:
    case Mechanism::ChronusPB:
      s.dram = rows * banks * kChronusCounterBits / 8.0;
      break;
    case Mechanism::Graphene: {
      s.entries = misra_gries_entries(nrh, timing);
      const int count_bits = ceil_log2(act_budget_per_window(timing) + 1);
      s.cpu_cam = static_cast<double>(s.entries) * banks * (row_bits + count_bits) / 8.0;
      break;
    }
    case Mechanism::Hydra: {
      const double groups = 32768.0 * geometry.ranks * geometry.channels;
      const int counter_bits = std::max(1, ceil_log2(half));
      const int tag_bits = row_bits + ceil_log2(static_cast<std::uint64_t>(banks));
      s.cpu_sram = groups * counter_bits / 8.0 + 4096.0 * (tag_bits + counter_bits) / 8.0;
      s.dram = rows * banks * counter_bits / 8.0;
      break;
    }
    case Mechanism::ABACuS: {
      s.entries = misra_gries_entries(nrh, timing);
      const int counter_bits = std::max(1, ceil_log2(half));
      s.cpu_cam = static_cast<double>(s.entries) * (row_bits + 2 * counter_bits + kAbacusMetaBits) /
                  8.0 * geometry.channels;
      break;
    }
  }
  return s;
}

}  // namespace rdlab
