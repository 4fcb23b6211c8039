#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/mitigation.hpp"
#include "rdlab/system.hpp"
#include "rdlab/trace.hpp"

namespace rdlab {

struct ResolvedMitigation {
  MitigationConfig config;
  // The analysis (or the mechanism's own sizing rule) says no row reaches N_RH.
  bool claimed_secure = false;
  std::uint32_t worst = 0;
  std::int64_t worst_r1 = 0;  // wave-attack row count that reaches `worst`
};

// Fills every zero parameter with the least aggressive secure value for
// the requested N_RH. Explicit values are kept, and judged as given.
ResolvedMitigation resolve_mitigation(const MitigationConfig& requested);

struct WorkloadSpec {
  std::string pattern = "HHHH";
  int mixes = 1;
  std::size_t trace_length = 0;  // 0 sizes synthetic traces from the instruction count
  std::vector<std::string> trace_files;
  bool perf_attack = false;      // the last core runs the perf-attack trace

  void validate() const;
};

struct Workload {
  std::string name;
  std::vector<Trace> traces;
};

std::vector<Workload> build_workloads(const WorkloadSpec& spec, const SystemConfig& system);

struct RunOutcome {
  std::string workload;
  ResolvedMitigation mitigation;
  SystemResult shared;
  std::vector<double> alone_ipc;
  double weighted_speedup = 0.0;
  double max_slowdown = 0.0;

  nlohmann::json to_json() const;
};

// Alone IPCs come from single-core runs with no mitigation and are cached
// per trace across calls.
RunOutcome run_workload(const SystemConfig& system, const Workload& workload);

struct SweepCell {
  Mechanism mechanism = Mechanism::None;
  std::uint32_t nrh = 0;
  std::string workload;
};

struct SweepCellResult {
  SweepCell cell;
  std::optional<RunOutcome> outcome;
  double normalized_ws = 0.0;  // against the no-mitigation run of the same workload
  std::string error;
};

struct SweepResult {
  std::vector<SweepCellResult> cells;

  std::vector<const SweepCellResult*> failed() const;
  const SweepCellResult* find(Mechanism m, std::uint32_t nrh, const std::string& workload) const;
  // Mean normalized weighted speedup over workloads.
  std::optional<double> mean_normalized_ws(Mechanism m, std::uint32_t nrh) const;
};

const std::vector<std::uint32_t>& default_nrh_grid();

// Every (mechanism, N_RH, workload) cell runs independently on a bounded
// pool; a no-mitigation cell per workload is always added.
SweepResult run_sweep(const SystemConfig& base, const std::vector<Mechanism>& mechanisms,
                      const std::vector<std::uint32_t>& nrhs, const WorkloadSpec& workloads,
                      int threads);

}  // namespace rdlab
