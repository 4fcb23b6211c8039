#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/analytic.hpp"
#include "rdlab/attack_bench.hpp"

namespace rdlab {

struct WaveSpec {
  std::int64_t r1 = 8;
  int bank = 0;
  std::int64_t first_row = 16;
  // Aggressors this far apart never share a victim.
  std::int64_t spacing = 5;
  // Bring every row to one below the back-off threshold before round 1.
  bool prehammer = true;
  // Stop once the attack has used tREFW; otherwise run until every row is mitigated.
  bool within_refresh_window = false;
  int max_rounds = 1 << 20;
  bool periodic_refresh = false;
  // Stop as soon as the oracle reports a violation.
  bool stop_on_violation = true;
  std::int64_t rows_per_bank = 0;  // 0 keeps the default geometry
  // Command-level hammering skips the column read.
  bool read = true;
  // Spend the first back-off on decoy rows so the waves start right after a
  // recovery, the phase the analytic recurrence assumes.
  bool warmup = true;
};

struct AttackResult {
  std::vector<std::int64_t> trajectory;
  std::uint32_t max_exposure = 0;
  std::uint64_t violations = 0;
  std::uint64_t activations = 0;
  std::uint64_t backoffs = 0;
  std::uint64_t rfms = 0;
  std::uint64_t protocol_violations = 0;
  int max_window_acts = 0;
  Ps elapsed = 0;
  Ps rfm_busy = 0;

  nlohmann::json to_json() const;
};

// Balanced wave attack: every surviving row is hammered once per round;
// rows whose victims the device refreshed drop out before the next round.
AttackResult run_wave_attack(const MitigationConfig& cfg, const WaveSpec& spec);

// Pre-hammer level the wave attack uses for a mechanism.
std::uint32_t prehammer_level(const MitigationConfig& cfg);

struct OverwhelmSpec {
  int bank = 0;
  std::int64_t first_row = 16;
  std::int64_t spacing = 5;
};

struct OverwhelmResult {
  AttackResult attack;
  int hot_rows_forced = 0;
  int rfms_first_backoff = 0;
  std::uint32_t focus_count = 0;
};

// Three steps against Chronus: bring A_normal+1 rows to N_BO-1, trigger one
// and hammer the others inside the window so all are hot at once, then
// hammer one row through a whole window.
OverwhelmResult run_overwhelm(const MitigationConfig& cfg, const OverwhelmSpec& spec = {});

struct RandomScheduleSpec {
  int banks = 1;
  int rows = 4;
  std::size_t hammers = 400;
  double idle_probability = 0.05;
  Ps max_idle = from_ns(500);
  std::uint64_t seed = 0;
};

struct ScheduleMeasure {
  Ps window = 0;
  Ps rfm_time = 0;
  DbcChain chain;
};

// A random legal schedule driven against the back-off protocol, measured
// against the bandwidth-consumption bound for `aboth`/`nbo_r`.
ScheduleMeasure run_random_schedule(const MitigationConfig& cfg, const RandomScheduleSpec& spec,
                                    std::uint32_t aboth, int nbo_r);

// The analytical worst-case pattern: one row triggered with aboth ACTs, again
// and again, single bank.
ScheduleMeasure run_dbc_worst_pattern(const MitigationConfig& cfg, std::uint32_t aboth, int nbo_r,
                                      int backoffs);

struct RandomTrafficSpec {
  std::uint64_t activations = 1'000'000;
  int banks = 4;
  int hot_rows = 24;
  double hot_fraction = 0.9;
  bool periodic_refresh = true;
  std::uint64_t seed = 0;
};

// Skewed random ACT traffic for the safety oracle.
AttackResult run_random_traffic(const MitigationConfig& cfg, const RandomTrafficSpec& spec);

}  // namespace rdlab
