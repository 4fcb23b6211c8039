#pragma once

#include <cstdint>
#include <memory>

#include "rdlab/channel.hpp"
#include "rdlab/maintenance.hpp"
#include "rdlab/mitigation.hpp"

namespace rdlab {

struct BenchConfig {
  DeviceGeometry geometry;
  MitigationConfig mitigation;
  RefreshConfig refresh{false, 4};
  bool keep_log = false;
  std::uint64_t seed = 0;
};

// Command-level attacker harness: the attacker issues ACT/RD/PRE directly
// while the maintenance unit runs refresh, RFM and the back-off protocol
// exactly as the memory controller would. Uses the timing the mechanism
// calls for.
class AttackBench {
 public:
  explicit AttackBench(const BenchConfig& config);

  // Runs all maintenance that is due and returns the earliest time an ACT to
  // `bank` could go out. Calling it again without other calls in between
  // returns the same time.
  Ps ready_to_activate(int bank);
  // ACT, RD, PRE to `row`; returns the ACT time.
  // ACT, an optional RD, then PRE as early as timing allows.
  Ps hammer(int bank, std::int64_t row, bool read = true);
  // Lets maintenance run with no demand until `t`.
  void idle_until(Ps t);

  Ps now() const { return cursor_; }
  DramChannel& channel() { return *channel_; }
  const DramChannel& channel() const { return *channel_; }
  MaintenanceUnit& maintenance() { return *maint_; }
  const MaintenanceUnit& maintenance() const { return *maint_; }
  const MitigationConfig& mitigation() const { return cfg_.mitigation; }

  // Privileged feedback: ACTs the oracle still charges this aggressor with.
  std::uint32_t exposure(int bank, std::int64_t row) const;

 private:
  bool step_maintenance(int demand_rank);
  void issue_at_earliest(CommandKind kind, int bank);

  BenchConfig cfg_;
  std::unique_ptr<DramChannel> channel_;
  std::unique_ptr<MaintenanceUnit> maint_;
  Ps cursor_ = 0;
  Ps clk_;
};

}  // namespace rdlab
