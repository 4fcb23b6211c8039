#include "rdlab/channel.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include "rdlab/errors.hpp"

namespace rdlab {

DramChannel::DramChannel(const DeviceGeometry& geometry, const TimingParams& timing,
                         const DeviceConfig& device, std::uint32_t nrh, bool keep_log)
    : geometry_(geometry),
      timing_(timing),
      timing_state_(timing, geometry.ranks, geometry.banks_per_rank()),
      device_(geometry, device),
      oracle_(geometry.rows_per_bank, device.blast_radius, nrh),
      rfm_busy_(static_cast<std::size_t>(geometry.ranks), 0),
      keep_log_(keep_log) {
  timing.validate();
  device_.set_refresh_listener([this](int bank, std::int64_t row, RefreshCause cause, Ps t) {
    oracle_.on_refresh(bank, row);
    for (auto& obs : observers_) obs(bank, row, cause, t);
  });
}

void DramChannel::check(CommandKind cmd, int flat_bank, Ps t) {
  if (t < last_t_) throw ProtocolError("command issued out of time order");
  const Ps ok = timing_state_.earliest(cmd, flat_bank, t);
  if (ok > t) {
    throw ProtocolError(std::string(to_string(cmd)) + " to bank " + std::to_string(flat_bank) +
                        " at " + std::to_string(t) + " ps, legal from " + std::to_string(ok));
  }
}

void DramChannel::note(CommandKind cmd, int flat_bank, std::int64_t row, Ps t, bool preventive) {
  timing_state_.record(cmd, flat_bank, t);
  ++counts_[cmd];
  last_t_ = t;
  if (keep_log_) log_.push_back(CommandRecord{t, cmd, flat_bank, row, preventive});
}

bool DramChannel::activate(int flat_bank, std::int64_t row, Ps t, bool preventive) {
  check(CommandKind::ACT, flat_bank, t);
  const bool fired = device_.on_activate(flat_bank, row, t, preventive);
  if (preventive) {
    ++counts_.preventive_acts;
  } else {
    oracle_.on_activate(flat_bank, row, t);
  }
  note(CommandKind::ACT, flat_bank, row, t, preventive);
  return fired;
}

bool DramChannel::precharge(int flat_bank, Ps t) {
  check(CommandKind::PRE, flat_bank, t);
  const auto row = device_.open_row(flat_bank);
  const bool asserted = device_.on_precharge(flat_bank, t);
  note(CommandKind::PRE, flat_bank, row.value_or(-1), t, false);
  return asserted;
}

void DramChannel::read(int flat_bank, Ps t) {
  check(CommandKind::RD, flat_bank, t);
  const auto row = device_.open_row(flat_bank);
  if (!row) throw ProtocolError("RD to closed bank " + std::to_string(flat_bank));
  note(CommandKind::RD, flat_bank, *row, t, false);
}

void DramChannel::write(int flat_bank, Ps t) {
  check(CommandKind::WR, flat_bank, t);
  const auto row = device_.open_row(flat_bank);
  if (!row) throw ProtocolError("WR to closed bank " + std::to_string(flat_bank));
  note(CommandKind::WR, flat_bank, *row, t, false);
}

void DramChannel::refresh(int rank, Ps t) {
  const int bank = rank * geometry_.banks_per_rank();
  check(CommandKind::REF, bank, t);
  device_.on_ref(rank, t);
  note(CommandKind::REF, bank, -1, t, false);
}

std::vector<RfmRefresh> DramChannel::rfm(int rank, Ps t) {
  const int bank = rank * geometry_.banks_per_rank();
  check(CommandKind::RFMab, bank, t);
  auto done = device_.on_rfm(rank, t);
  rfm_busy_[rank] += timing_.tRFM;
  note(CommandKind::RFMab, bank, -1, t, false);
  return done;
}

ReplayResult replay_check(const std::vector<CommandRecord>& log, const TimingParams& t,
                          const DeviceGeometry& geometry) {
  // Written without TimingState so the two implementations check each other.
  struct Bank {
    std::optional<Ps> act, pre, rd, wr;
    bool open = false;
  };
  const int per = geometry.banks_per_rank();
  std::vector<Bank> banks(static_cast<std::size_t>(geometry.banks_per_channel()));
  std::vector<Ps> busy(static_cast<std::size_t>(geometry.ranks), kLongAgo);
  std::vector<std::vector<Ps>> acts(static_cast<std::size_t>(geometry.ranks));
  std::optional<Ps> last_cmd, last_rd, last_wr;

  ReplayResult res;
  auto fail = [&](long i, const std::string& why) {
    res.first_violation = i;
    res.reason = why;
    return res;
  };
  auto before = [](const std::optional<Ps>& prev, Ps gap, Ps now) {
    return prev && now < *prev + gap;
  };

  for (std::size_t i = 0; i < log.size(); ++i) {
    const CommandRecord& c = log[i];
    const long idx = static_cast<long>(i);
    const int rank = c.flat_bank / per;
    if (before(last_cmd, t.clock_period, c.t)) return fail(idx, "command bus");
    Bank& b = banks[c.flat_bank];
    switch (c.kind) {
      case CommandKind::ACT:
        if (b.open) return fail(idx, "ACT to open bank");
        if (before(b.act, t.tRC, c.t)) return fail(idx, "tRC");
        if (before(b.pre, t.tRP, c.t)) return fail(idx, "tRP");
        if (c.t < busy[rank]) return fail(idx, "ACT during REF/RFM");
        if (t.tFAW > 0) {
          auto& w = acts[rank];
          if (w.size() >= 4 && c.t < w[w.size() - 4] + t.tFAW) return fail(idx, "tFAW");
          w.push_back(c.t);
        }
        b.act = c.t;
        b.open = true;
        break;
      case CommandKind::PRE:
        if (!b.open) return fail(idx, "PRE to closed bank");
        if (before(b.act, t.tRAS, c.t)) return fail(idx, "tRAS");
        if (before(b.rd, t.tRTP, c.t)) return fail(idx, "tRTP");
        if (b.wr && c.t < *b.wr + t.tCWL + t.tBurst + t.tWR) return fail(idx, "tWR");
        b.pre = c.t;
        b.open = false;
        break;
      case CommandKind::RD:
        if (!b.open) return fail(idx, "RD to closed bank");
        if (before(b.act, t.tRCD, c.t)) return fail(idx, "tRCD");
        if (before(last_rd, t.tCCD, c.t)) return fail(idx, "tCCD");
        if (before(last_wr, t.tCWL + t.tBurst + t.tWTR, c.t)) return fail(idx, "tWTR");
        b.rd = c.t;
        last_rd = c.t;
        break;
      case CommandKind::WR:
        if (!b.open) return fail(idx, "WR to closed bank");
        if (before(b.act, t.tRCD, c.t)) return fail(idx, "tRCD");
        if (before(last_wr, t.tCCD, c.t)) return fail(idx, "tCCD");
        if (before(last_rd, t.tCL + t.tBurst + t.tRTW - t.tCWL, c.t)) return fail(idx, "read-to-write");
        b.wr = c.t;
        last_wr = c.t;
        break;
      case CommandKind::REF:
      case CommandKind::RFMab: {
        if (c.t < busy[rank]) return fail(idx, "overlapping REF/RFM");
        for (int k = rank * per; k < (rank + 1) * per; ++k) {
          const Bank& o = banks[k];
          if (o.open) return fail(idx, "REF/RFM with open bank");
          if (before(o.pre, t.tRP, c.t)) return fail(idx, "tRP before REF/RFM");
          if (before(o.act, t.tRC, c.t)) return fail(idx, "tRC before REF/RFM");
        }
        busy[rank] = c.t + (c.kind == CommandKind::REF ? t.tRFC : t.tRFM);
        break;
      }
    }
    last_cmd = c.t;
  }
  return res;
}

}  // namespace rdlab
