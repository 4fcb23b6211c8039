#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/cache.hpp"
#include "rdlab/channel.hpp"
#include "rdlab/controller.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/maintenance.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/mitigation.hpp"
#include "rdlab/timing.hpp"
#include "rdlab/trace.hpp"

namespace rdlab {

struct CoreConfig {
  int window = 128;
  int width = 4;
  Ps period = 238;  // 4.2 GHz
  Ps llc_latency = from_ns(10);
};

struct SystemConfig {
  DeviceGeometry geometry;
  TimingParams timing = make_timing(false);
  // Applied on top of the mechanism's own timing by the experiment runner.
  TimingOverrides timing_overrides;
  MitigationConfig mitigation;
  SchedulerConfig scheduler;
  RefreshConfig refresh;
  CacheConfig cache;
  CoreConfig core;
  EnergyWeights energy;
  std::uint64_t instructions = 1'000'000;
  Ps max_time = from_ns(2e8);
  std::uint64_t seed = 0;
  bool keep_log = false;
  bool dump_device = false;
};

struct CoreResult {
  std::string trace;
  std::uint64_t instructions = 0;
  Ps finish = 0;
  double ipc = 0.0;
  double rbmpki = 0.0;
};

struct SystemResult {
  std::vector<CoreResult> cores;
  Ps elapsed = 0;
  bool timed_out = false;
  CommandCounts counts;
  EnergyBreakdown energy;
  std::uint32_t max_exposure = 0;
  std::uint64_t violations = 0;
  std::uint64_t backoffs = 0;
  std::uint64_t rfms = 0;
  Ps rfm_busy = 0;
  Ps max_ref_gap = 0;
  int max_window_acts = 0;
  std::uint64_t protocol_violations = 0;
  nlohmann::json controller;
  nlohmann::json maintenance;
  std::vector<CommandRecord> log;
  nlohmann::json device_dump;  // counters and ATT at the end, when asked for

  std::vector<double> ipcs() const;
  nlohmann::json to_json() const;
};

// The mitigation config must already be resolved (no derived zeros left).
SystemResult run_system(const SystemConfig& config, const std::vector<Trace>& traces);

}  // namespace rdlab
