#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "rdlab/address.hpp"

namespace rdlab {

struct TraceEntry {
  std::uint32_t bubbles = 0;
  std::uint64_t address = 0;
  bool is_write = false;

  bool operator==(const TraceEntry&) const = default;
};

enum class Intensity { H, M, L, Attack, Unknown };
const char* to_string(Intensity i);
Intensity parse_intensity(const std::string& s);

struct Trace {
  std::string name;
  Intensity intensity = Intensity::Unknown;
  // Requests go straight to the controller, skipping the LLC.
  bool bypass_cache = false;
  std::vector<TraceEntry> entries;

  std::uint64_t instructions() const;
};

// Line format: `<bubbles> <hex-address> [W]`. Blank lines and lines starting
// with '#' are ignored.
Trace parse_trace(std::istream& in, const std::string& name);
Trace load_trace(const std::string& path);
void save_trace(const Trace& trace, const std::string& path);

Trace gen_synthetic(Intensity intensity, std::size_t length, std::uint64_t seed,
                    std::uint64_t capacity_bytes);

// One attacker core looping over `rows` rows in each of `banks` banks of
// rank 0, uncached, so that every access is a row conflict.
Trace gen_perf_attack(const AddressMapper& mapper, int rows = 8, int banks = 4,
                      std::size_t length = 4096);

struct WorkloadMix {
  std::string name;
  std::string pattern;
  std::uint64_t seed = 0;
};

// Six type patterns, ten seeds each.
const std::vector<std::string>& mix_patterns();
std::vector<WorkloadMix> workload_mixes(const std::string& pattern, int count = 10);
std::vector<Trace> build_mix(const WorkloadMix& mix, std::size_t length,
                             std::uint64_t capacity_bytes);

}  // namespace rdlab
