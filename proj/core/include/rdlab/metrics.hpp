#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rdlab/timing.hpp"

namespace rdlab {

struct CommandCounts {
  std::array<std::uint64_t, kAllCommands.size()> by_kind{};
  std::uint64_t preventive_acts = 0;

  std::uint64_t& operator[](CommandKind k) { return by_kind[static_cast<std::size_t>(k)]; }
  std::uint64_t operator[](CommandKind k) const { return by_kind[static_cast<std::size_t>(k)]; }
  CommandCounts& operator+=(const CommandCounts& o);
};

struct EnergyWeights {
  double act_pre = 2.0;
  double rd = 1.2;
  double wr = 1.3;
  double ref = 50.0;
  double rfm = 50.0;
  double chronus_act_multiplier = 1.1907;

  void validate() const;
};

struct EnergyBreakdown {
  double act = 0.0;
  double rd = 0.0;
  double wr = 0.0;
  double ref = 0.0;
  double rfm = 0.0;

  double total() const { return act + rd + wr + ref + rfm; }
};

// ACT/PRE pairs are charged once per ACT.
EnergyBreakdown energy(const CommandCounts& counts, const EnergyWeights& weights,
                       bool chronus_counters);

double weighted_speedup(const std::vector<double>& shared_ipc, const std::vector<double>& alone_ipc);
double max_slowdown(const std::vector<double>& shared_ipc, const std::vector<double>& alone_ipc);

}  // namespace rdlab
