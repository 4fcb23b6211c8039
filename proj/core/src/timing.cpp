#include "rdlab/timing.hpp"

#include <algorithm>

#include "rdlab/errors.hpp"

namespace rdlab {

std::string_view to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::ACT: return "ACT";
    case CommandKind::PRE: return "PRE";
    case CommandKind::RD: return "RD";
    case CommandKind::WR: return "WR";
    case CommandKind::REF: return "REF";
    case CommandKind::RFMab: return "RFMab";
  }
  return "?";
}

bool is_rank_command(CommandKind kind) {
  return kind == CommandKind::REF || kind == CommandKind::RFMab;
}

TimingParams make_timing(bool prac_enabled, std::string_view speed_bin) {
  if (speed_bin != "DDR5-3200AN") {
    throw ConfigError("unsupported speed bin '" + std::string(speed_bin) + "'");
  }
  TimingParams t;
  t.clock_period = 625;  // 1600 MHz
  t.tRCD = from_ns(15);
  t.tREFW = from_ns(32e6);
  t.tREFI = from_ns(3900);
  t.tRFM = from_ns(350);
  t.tRFC = from_ns(350);
  t.tABOact = from_ns(180);
  t.tCL = 24 * t.clock_period;
  t.tCWL = 22 * t.clock_period;
  t.tBurst = 8 * t.clock_period;
  t.tCCD = 8 * t.clock_period;
  t.tWTR = 4 * t.clock_period;
  t.tRTW = 2 * t.clock_period;
  t.tFAW = 0;
  t.prac = prac_enabled;
  if (prac_enabled) {
    t.tRAS = from_ns(16);
    t.tRP = from_ns(36);
    t.tRC = from_ns(52);
    t.tRTP = from_ns(5);
    t.tWR = from_ns(10);
  } else {
    t.tRAS = from_ns(32);
    t.tRP = from_ns(15);
    t.tRC = from_ns(47);
    t.tRTP = from_ns(7.5);
    t.tWR = from_ns(30);
  }
  return t;
}

void TimingParams::validate() const {
  const std::pair<const char*, Ps> required[] = {
      {"tRC", tRC},     {"tRAS", tRAS},   {"tRP", tRP},       {"tRTP", tRTP},
      {"tWR", tWR},     {"tRCD", tRCD},   {"tREFW", tREFW},   {"tREFI", tREFI},
      {"tRFM", tRFM},   {"tRFC", tRFC},   {"tABOact", tABOact},
      {"clock_period", clock_period},     {"tCL", tCL},       {"tCWL", tCWL},
      {"tBurst", tBurst}, {"tCCD", tCCD}};
  for (const auto& [name, value] : required) {
    if (value <= 0) throw ConfigError(std::string(name) + " must be positive");
  }
  if (tWTR < 0 || tRTW < 0 || tFAW < 0) throw ConfigError("bus turnaround and tFAW must be >= 0");
  if (tRC < std::max(tRAS, tRP)) throw ConfigError("tRC must be >= max(tRAS, tRP)");
  if (tREFI >= tREFW) throw ConfigError("tREFI must be < tREFW");
}

const std::vector<std::string>& timing_override_keys() {
  static const std::vector<std::string> keys = {"tRC",  "tRAS", "tRP",     "tRTP",  "tWR",
                                                "tRFM", "tABOact", "tREFW", "tREFI", "tRFC"};
  return keys;
}

TimingParams apply_overrides(TimingParams t, const TimingOverrides& overrides) {
  for (const auto& [key, ns] : overrides) {
    if (!(ns > 0.0)) throw ConfigError("timing." + key + " must be positive");
    const Ps v = from_ns(ns);
    if (key == "tRC") t.tRC = v;
    else if (key == "tRAS") t.tRAS = v;
    else if (key == "tRP") t.tRP = v;
    else if (key == "tRTP") t.tRTP = v;
    else if (key == "tWR") t.tWR = v;
    else if (key == "tRFM") t.tRFM = v;
    else if (key == "tABOact") t.tABOact = v;
    else if (key == "tREFW") t.tREFW = v;
    else if (key == "tREFI") t.tREFI = v;
    else if (key == "tRFC") t.tRFC = v;
    else throw ConfigError("unknown timing key '" + key + "'");
  }
  t.validate();
  return t;
}

bool operator==(const TimingParams& a, const TimingParams& b) {
  return a.tRC == b.tRC && a.tRAS == b.tRAS && a.tRP == b.tRP && a.tRTP == b.tRTP &&
         a.tWR == b.tWR && a.tRCD == b.tRCD && a.tREFW == b.tREFW && a.tREFI == b.tREFI &&
         a.tRFM == b.tRFM && a.tRFC == b.tRFC && a.tABOact == b.tABOact &&
         a.clock_period == b.clock_period && a.tCL == b.tCL && a.tCWL == b.tCWL &&
         a.tBurst == b.tBurst && a.tCCD == b.tCCD && a.tWTR == b.tWTR && a.tRTW == b.tRTW &&
         a.tFAW == b.tFAW && a.prac == b.prac;
}

TimingState::TimingState(const TimingParams& timing, int ranks, int banks_per_rank)
    : timing_(timing),
      ranks_(ranks),
      banks_per_rank_(banks_per_rank),
      banks_(static_cast<std::size_t>(ranks * banks_per_rank)),
      rank_busy_(static_cast<std::size_t>(ranks), kLongAgo),
      faw_(static_cast<std::size_t>(ranks)),
      faw_head_(static_cast<std::size_t>(ranks), 0) {
  for (auto& w : faw_) w.fill(kLongAgo);
}

Ps TimingState::earliest(CommandKind cmd, int flat_bank, Ps now) const {
  const TimingParams& t = timing_;
  const int rank = rank_of(flat_bank);
  Ps at = std::max(now, last_cmd_ + t.clock_period);

  switch (cmd) {
    case CommandKind::ACT: {
      const BankHistory& b = banks_[flat_bank];
      at = std::max({at, b.last_act + t.tRC, b.last_pre + t.tRP, rank_busy_[rank]});
      if (t.tFAW > 0) at = std::max(at, faw_[rank][faw_head_[rank]] + t.tFAW);
      break;
    }
    case CommandKind::PRE: {
      const BankHistory& b = banks_[flat_bank];
      at = std::max({at, b.last_act + t.tRAS, b.last_rd + t.tRTP, b.last_wr_done + t.tWR});
      break;
    }
    case CommandKind::RD: {
      const BankHistory& b = banks_[flat_bank];
      at = std::max({at, b.last_act + t.tRCD, last_rd_ + t.tCCD,
                     last_wr_ + t.tCWL + t.tBurst + t.tWTR});
      break;
    }
    case CommandKind::WR: {
      const BankHistory& b = banks_[flat_bank];
      at = std::max({at, b.last_act + t.tRCD, last_wr_ + t.tCCD,
                     last_rd_ + t.tCL + t.tBurst + t.tRTW - t.tCWL});
      break;
    }
    case CommandKind::REF:
    case CommandKind::RFMab: {
      at = std::max(at, rank_busy_[rank]);
      const int first = rank * banks_per_rank_;
      for (int i = first; i < first + banks_per_rank_; ++i) {
        const BankHistory& b = banks_[i];
        at = std::max({at, b.last_pre + t.tRP, b.last_act + t.tRC});
      }
      break;
    }
  }
  return at;
}

void TimingState::record(CommandKind cmd, int flat_bank, Ps t) {
  const int rank = rank_of(flat_bank);
  last_cmd_ = t;
  switch (cmd) {
    case CommandKind::ACT:
      banks_[flat_bank].last_act = t;
      faw_[rank][faw_head_[rank]] = t;
      faw_head_[rank] = (faw_head_[rank] + 1) % 4;
      break;
    case CommandKind::PRE:
      banks_[flat_bank].last_pre = t;
      break;
    case CommandKind::RD:
      banks_[flat_bank].last_rd = t;
      last_rd_ = t;
      break;
    case CommandKind::WR:
      banks_[flat_bank].last_wr_done = timing_.write_done_after(t);
      last_wr_ = t;
      break;
    case CommandKind::REF:
      rank_busy_[rank] = t + timing_.tRFC;
      break;
    case CommandKind::RFMab:
      rank_busy_[rank] = t + timing_.tRFM;
      break;
  }
}

Ps earliest_issue_time(const TimingState& history, CommandKind cmd, int flat_bank, Ps now) {
  return history.earliest(cmd, flat_bank, now);
}

}  // namespace rdlab
