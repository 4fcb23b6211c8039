#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdlab/time.hpp"

namespace rdlab {

enum class CommandKind : std::uint8_t { ACT, PRE, RD, WR, REF, RFMab };

inline constexpr std::array<CommandKind, 6> kAllCommands = {
    CommandKind::ACT, CommandKind::PRE, CommandKind::RD,
    CommandKind::WR,  CommandKind::REF, CommandKind::RFMab};

std::string_view to_string(CommandKind kind);
bool is_rank_command(CommandKind kind);

struct TimingParams {
  Ps tRC = 0;
  Ps tRAS = 0;
  Ps tRP = 0;
  Ps tRTP = 0;
  Ps tWR = 0;
  Ps tRCD = 0;
  Ps tREFW = 0;
  Ps tREFI = 0;
  Ps tRFM = 0;
  Ps tRFC = 0;
  Ps tABOact = 0;
  Ps clock_period = 0;

  // Data bus; DDR5-3200AN public values.
  Ps tCL = 0;
  Ps tCWL = 0;
  Ps tBurst = 0;
  Ps tCCD = 0;
  Ps tWTR = 0;
  Ps tRTW = 0;  // extra read-to-write bus turnaround
  Ps tFAW = 0;  // 0 disables the four-activate window

  bool prac = false;

  // Throws ConfigError when a field is non-positive or inconsistent.
  void validate() const;

  // Time from ACT until the last data beat of a read to the opened row.
  Ps act_to_read_done() const { return tRCD + tCL + tBurst; }
  Ps write_done_after(Ps wr) const { return wr + tCWL + tBurst; }
};

TimingParams make_timing(bool prac_enabled, std::string_view speed_bin = "DDR5-3200AN");

bool operator==(const TimingParams& a, const TimingParams& b);

// Overridable timing keys, values in ns.
const std::vector<std::string>& timing_override_keys();
using TimingOverrides = std::vector<std::pair<std::string, double>>;
TimingParams apply_overrides(TimingParams timing, const TimingOverrides& overrides);

// Per-command issue history used for legality arithmetic.
class TimingState {
 public:
  TimingState(const TimingParams& timing, int ranks, int banks_per_rank);

  // Smallest time >= now at which cmd is legal for the given bank (rank-level
  // commands take any bank of the rank).
  Ps earliest(CommandKind cmd, int flat_bank, Ps now) const;
  void record(CommandKind cmd, int flat_bank, Ps t);

  const TimingParams& timing() const { return timing_; }
  int ranks() const { return ranks_; }
  int banks_per_rank() const { return banks_per_rank_; }
  int rank_of(int flat_bank) const { return flat_bank / banks_per_rank_; }
  Ps rank_busy_until(int rank) const { return rank_busy_[rank]; }

 private:
  struct BankHistory {
    Ps last_act = kLongAgo;
    Ps last_pre = kLongAgo;
    Ps last_rd = kLongAgo;
    Ps last_wr_done = kLongAgo;
  };

  TimingParams timing_;
  int ranks_;
  int banks_per_rank_;
  std::vector<BankHistory> banks_;
  std::vector<Ps> rank_busy_;
  std::vector<std::array<Ps, 4>> faw_;
  std::vector<int> faw_head_;
  Ps last_cmd_ = kLongAgo;
  Ps last_rd_ = kLongAgo;
  Ps last_wr_ = kLongAgo;
};

Ps earliest_issue_time(const TimingState& history, CommandKind cmd, int flat_bank, Ps now);

}  // namespace rdlab
