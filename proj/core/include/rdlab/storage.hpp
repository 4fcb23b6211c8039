#pragma once

#include <cstdint>

#include "rdlab/geometry.hpp"
#include "rdlab/mitigation.hpp"
#include "rdlab/timing.hpp"

namespace rdlab {

struct StorageBytes {
  double cpu_sram = 0.0;
  double cpu_cam = 0.0;
  double dram = 0.0;
  std::uint64_t entries = 0;  // tracker entries where the mechanism has a table

  double cpu() const { return cpu_sram + cpu_cam; }
  double total() const { return cpu() + dram; }
};

int ceil_log2(std::uint64_t v);

// Tracker entries needed so the Misra-Gries spill stays below threshold
// nrh/2 for a full refresh window of activations.
std::uint64_t misra_gries_entries(std::uint32_t nrh, const TimingParams& timing);

StorageBytes storage_model(Mechanism mechanism, std::uint32_t nrh, const DeviceGeometry& geometry,
                           const TimingParams& timing = make_timing(false));

}  // namespace rdlab
