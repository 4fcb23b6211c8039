#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/channel.hpp"
#include "rdlab/mitigation.hpp"

namespace rdlab {

struct RefreshConfig {
  bool enabled = true;
  int postpone_max = 4;
};

struct MaintenanceCommand {
  enum class Purpose { CloseBank, Refresh, PrfmRfm, BackoffRfm, PreventiveAct, PreventivePre, ExtraRead };
  CommandKind kind = CommandKind::PRE;
  Purpose purpose = Purpose::CloseBank;
  int flat_bank = 0;
  std::int64_t row = -1;
  Ps at = 0;
};

// Everything the controller does besides serving demand requests: periodic
// refresh with postponement, PRFM counting, the back-off response protocol
// and preventive refreshes requested by controller-side mechanisms.
class MaintenanceUnit {
 public:
  enum class Backoff { Idle, Window, Recovery };

  MaintenanceUnit(DramChannel& channel, const MitigationConfig& mitigation,
                  const RefreshConfig& refresh, std::uint64_t seed);

  void advance(Ps now);

  bool in_window(int rank) const { return ranks_[rank].backoff == Backoff::Window; }
  Ps window_end(int rank) const { return ranks_[rank].window_end; }
  void close_window(int rank);
  Backoff backoff(int rank) const { return ranks_[rank].backoff; }

  // No new demand ACT/RD/WR may start in this rank.
  bool rank_draining(int rank) const;
  // Preventive work owns this bank.
  bool bank_busy(int flat_bank) const;

  std::optional<MaintenanceCommand> next(int rank, Ps now, bool rank_has_demand);
  void execute(const MaintenanceCommand& cmd);

  void on_demand_activate(int flat_bank, std::int64_t row, Ps t);

  // Earliest time at which advance() could change state on its own.
  Ps next_event(Ps now) const;

  const ControllerMitigation* mitigation() const { return mitigation_.get(); }
  nlohmann::json stats() const;

  std::uint64_t backoffs() const { return backoffs_; }
  std::uint64_t backoff_rfms() const { return backoff_rfms_; }
  std::uint64_t prfm_rfms() const { return prfm_rfms_; }
  Ps max_ref_gap() const { return max_ref_gap_; }
  int max_window_acts_per_bank() const { return max_window_acts_; }
  std::uint64_t protocol_violations() const { return protocol_violations_; }

 private:
  struct RankState {
    Backoff backoff = Backoff::Idle;
    Ps window_end = 0;
    int rfms_this_recovery = 0;
    int owed = 0;
    Ps next_ref_due = 0;
    Ps last_ref = kLongAgo;
    bool ref_draining = false;
    bool prfm_pending = false;
    std::vector<int> window_acts;
  };
  struct BankState {
    std::uint32_t prfm_count = 0;
    std::deque<std::int64_t> preventive;
    int extra_reads = 0;
    bool preventive_open = false;
  };

  std::optional<MaintenanceCommand> close_or(int rank, CommandKind kind,
                                             MaintenanceCommand::Purpose purpose, Ps now);
  std::optional<MaintenanceCommand> bank_work(int rank, Ps now);

  DramChannel& ch_;
  MitigationConfig cfg_;
  RefreshConfig ref_cfg_;
  std::unique_ptr<ControllerMitigation> mitigation_;
  std::vector<RankState> ranks_;
  std::vector<BankState> banks_;
  std::vector<PreventiveAction> actions_;
  std::vector<std::int64_t> scratch_;
  int per_rank_;
  bool prfm_;
  bool backoff_enabled_;

  std::uint64_t backoffs_ = 0;
  std::uint64_t backoff_rfms_ = 0;
  std::uint64_t prfm_rfms_ = 0;
  std::uint64_t refs_ = 0;
  std::uint64_t preventive_refreshes_ = 0;
  std::uint64_t extra_reads_ = 0;
  std::uint64_t postponements_ = 0;
  std::uint64_t protocol_violations_ = 0;
  Ps max_ref_gap_ = 0;
  int max_window_acts_ = 0;
};

}  // namespace rdlab
