#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rdlab/device.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/oracle.hpp"
#include "rdlab/timing.hpp"

namespace rdlab {

struct CommandRecord {
  Ps t = 0;
  CommandKind kind = CommandKind::ACT;
  int flat_bank = 0;
  std::int64_t row = -1;
  bool preventive = false;
};

// Owns the device, its timing history and the safety oracle, and is the only
// path through which commands reach the device. Every command is checked
// against the timing model before it is applied.
class DramChannel {
 public:
  using RefreshObserver = std::function<void(int flat_bank, std::int64_t row, RefreshCause, Ps)>;

  DramChannel(const DeviceGeometry& geometry, const TimingParams& timing,
              const DeviceConfig& device, std::uint32_t nrh, bool keep_log = false);

  Ps earliest(CommandKind cmd, int flat_bank, Ps now) const {
    return timing_state_.earliest(cmd, flat_bank, now);
  }

  // Returns true when the ACT made the row hot (CCU) or the PRE asserted
  // the back-off signal.
  bool activate(int flat_bank, std::int64_t row, Ps t, bool preventive = false);
  bool precharge(int flat_bank, Ps t);
  void read(int flat_bank, Ps t);
  void write(int flat_bank, Ps t);
  void refresh(int rank, Ps t);
  std::vector<RfmRefresh> rfm(int rank, Ps t);

  void add_refresh_observer(RefreshObserver obs) { observers_.push_back(std::move(obs)); }

  DramDevice& device() { return device_; }
  const DramDevice& device() const { return device_; }
  SafetyOracle& oracle() { return oracle_; }
  const SafetyOracle& oracle() const { return oracle_; }
  const TimingState& timing_state() const { return timing_state_; }
  const TimingParams& timing() const { return timing_; }
  const DeviceGeometry& geometry() const { return geometry_; }
  const CommandCounts& counts() const { return counts_; }
  const std::vector<CommandRecord>& log() const { return log_; }
  Ps rfm_busy(int rank) const { return rfm_busy_[rank]; }
  Ps last_command_time() const { return last_t_; }
  int rank_of(int flat_bank) const { return flat_bank / geometry_.banks_per_rank(); }

 private:
  void check(CommandKind cmd, int flat_bank, Ps t);
  void note(CommandKind cmd, int flat_bank, std::int64_t row, Ps t, bool preventive);

  DeviceGeometry geometry_;
  TimingParams timing_;
  TimingState timing_state_;
  DramDevice device_;
  SafetyOracle oracle_;
  CommandCounts counts_;
  std::vector<RefreshObserver> observers_;
  std::vector<CommandRecord> log_;
  std::vector<Ps> rfm_busy_;
  bool keep_log_;
  Ps last_t_ = kLongAgo;
};

// Independent legality replay of a command log: returns the index of the
// first offending command, or -1 when the whole log is legal.
struct ReplayResult {
  long first_violation = -1;
  std::string reason;
};
ReplayResult replay_check(const std::vector<CommandRecord>& log, const TimingParams& timing,
                          const DeviceGeometry& geometry);

}  // namespace rdlab
