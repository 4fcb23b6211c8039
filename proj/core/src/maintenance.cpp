#include "rdlab/maintenance.hpp"

#include <algorithm>

#include "rdlab/errors.hpp"

namespace rdlab {

MaintenanceUnit::MaintenanceUnit(DramChannel& channel, const MitigationConfig& mitigation,
                                 const RefreshConfig& refresh, std::uint64_t seed)
    : ch_(channel),
      cfg_(mitigation),
      ref_cfg_(refresh),
      mitigation_(make_controller_mitigation(mitigation, channel.geometry(), channel.timing(), seed)),
      ranks_(static_cast<std::size_t>(channel.geometry().ranks)),
      banks_(static_cast<std::size_t>(channel.geometry().banks_per_channel())),
      per_rank_(channel.geometry().banks_per_rank()),
      prfm_(uses_prfm(mitigation.mechanism)),
      backoff_enabled_(uses_device_backoff(mitigation.mechanism)) {
  if (refresh.postpone_max < 0 || refresh.postpone_max > 4) {
    throw ConfigError("refresh.postpone_max must lie in [0, 4]");
  }
  if (prfm_ && mitigation.rfm_th < 1) throw ConfigError("PRFM needs RFM_th >= 1");
  const Ps trefi = channel.timing().tREFI;
  for (std::size_t r = 0; r < ranks_.size(); ++r) {
    // Ranks are staggered across the refresh interval.
    ranks_[r].next_ref_due = trefi * static_cast<Ps>(r + 1) / static_cast<Ps>(ranks_.size());
    ranks_[r].window_acts.assign(static_cast<std::size_t>(per_rank_), 0);
  }
}

void MaintenanceUnit::advance(Ps now) {
  const TimingParams& t = ch_.timing();
  for (std::size_t r = 0; r < ranks_.size(); ++r) {
    RankState& rs = ranks_[r];
    if (ref_cfg_.enabled) {
      while (now >= rs.next_ref_due) {
        if (rs.owed > 0) ++postponements_;
        ++rs.owed;
        rs.next_ref_due += t.tREFI;
      }
    }
    if (!backoff_enabled_) continue;
    const int rank = static_cast<int>(r);
    if (rs.backoff == Backoff::Idle && ch_.device().alert_visible(rank, now)) {
      rs.backoff = Backoff::Window;
      rs.window_end = ch_.device().backoff(rank).asserted_at + t.tABOact;
      rs.rfms_this_recovery = 0;
      std::fill(rs.window_acts.begin(), rs.window_acts.end(), 0);
      ++backoffs_;
    }
    if (rs.backoff == Backoff::Window && now >= rs.window_end) rs.backoff = Backoff::Recovery;
  }
}

Ps MaintenanceUnit::next_event(Ps now) const {
  Ps next = kNever;
  for (std::size_t r = 0; r < ranks_.size(); ++r) {
    const RankState& rs = ranks_[r];
    if (ref_cfg_.enabled) next = std::min(next, rs.next_ref_due);
    if (rs.backoff == Backoff::Window) next = std::min(next, rs.window_end);
    const auto& bo = ch_.device().backoff(static_cast<int>(r));
    if (rs.backoff == Backoff::Idle && bo.asserted() && bo.asserted_at > now) {
      next = std::min(next, bo.asserted_at);
    }
  }
  return next;
}

void MaintenanceUnit::close_window(int rank) {
  if (ranks_[rank].backoff == Backoff::Window) ranks_[rank].backoff = Backoff::Recovery;
}

bool MaintenanceUnit::rank_draining(int rank) const {
  const RankState& rs = ranks_[rank];
  return rs.backoff == Backoff::Recovery || rs.ref_draining ||
         (rs.prfm_pending && rs.backoff == Backoff::Idle);
}

bool MaintenanceUnit::bank_busy(int flat_bank) const {
  const BankState& b = banks_[flat_bank];
  return !b.preventive.empty() || b.extra_reads > 0 || b.preventive_open;
}

std::optional<MaintenanceCommand> MaintenanceUnit::close_or(int rank, CommandKind kind,
                                                            MaintenanceCommand::Purpose purpose,
                                                            Ps now) {
  std::optional<MaintenanceCommand> best;
  for (int b = rank * per_rank_; b < (rank + 1) * per_rank_; ++b) {
    if (!ch_.device().open_row(b)) continue;
    // Pending extra counter reads go out before the bank is closed.
    if (banks_[b].extra_reads > 0) {
      const Ps at = ch_.earliest(CommandKind::RD, b, now);
      if (!best || at < best->at) {
        best = MaintenanceCommand{CommandKind::RD, MaintenanceCommand::Purpose::ExtraRead, b, -1, at};
      }
      continue;
    }
    const Ps at = ch_.earliest(CommandKind::PRE, b, now);
    if (!best || at < best->at) {
      best = MaintenanceCommand{CommandKind::PRE, MaintenanceCommand::Purpose::CloseBank, b, -1, at};
    }
  }
  if (best) return best;
  const int bank0 = rank * per_rank_;
  return MaintenanceCommand{kind, purpose, bank0, -1, ch_.earliest(kind, bank0, now)};
}

std::optional<MaintenanceCommand> MaintenanceUnit::bank_work(int rank, Ps now) {
  std::optional<MaintenanceCommand> best;
  auto offer = [&best](MaintenanceCommand c) {
    if (!best || c.at < best->at) best = c;
  };
  for (int b = rank * per_rank_; b < (rank + 1) * per_rank_; ++b) {
    BankState& bs = banks_[b];
    const auto open = ch_.device().open_row(b);
    if (bs.extra_reads > 0) {
      if (open) {
        offer({CommandKind::RD, MaintenanceCommand::Purpose::ExtraRead, b, *open,
               ch_.earliest(CommandKind::RD, b, now)});
        continue;
      }
      bs.extra_reads = 0;
    }
    if (bs.preventive_open || (!bs.preventive.empty() && open)) {
      if (open) {
        offer({CommandKind::PRE, MaintenanceCommand::Purpose::PreventivePre, b, *open,
               ch_.earliest(CommandKind::PRE, b, now)});
        continue;
      }
      bs.preventive_open = false;
    }
    if (!bs.preventive.empty()) {
      offer({CommandKind::ACT, MaintenanceCommand::Purpose::PreventiveAct, b, bs.preventive.front(),
             ch_.earliest(CommandKind::ACT, b, now)});
    }
  }
  return best;
}

std::optional<MaintenanceCommand> MaintenanceUnit::next(int rank, Ps now, bool rank_has_demand) {
  RankState& rs = ranks_[rank];
  using P = MaintenanceCommand::Purpose;

  if (rs.backoff == Backoff::Recovery) {
    if (!ch_.device().backoff(rank).asserted()) {
      rs.backoff = Backoff::Idle;
    } else {
      return close_or(rank, CommandKind::RFMab, P::BackoffRfm, now);
    }
  }
  if (rs.backoff == Backoff::Idle) {
    if (rs.prfm_pending) return close_or(rank, CommandKind::RFMab, P::PrfmRfm, now);
    if (!rs.ref_draining && rs.owed > 0 &&
        (rs.owed > ref_cfg_.postpone_max || !rank_has_demand)) {
      rs.ref_draining = true;
    }
    if (rs.ref_draining) return close_or(rank, CommandKind::REF, P::Refresh, now);
  }
  return bank_work(rank, now);
}

void MaintenanceUnit::execute(const MaintenanceCommand& c) {
  using P = MaintenanceCommand::Purpose;
  const int rank = ch_.rank_of(c.flat_bank);
  RankState& rs = ranks_[rank];
  BankState& bs = banks_[c.flat_bank];
  switch (c.kind) {
    case CommandKind::PRE:
      ch_.precharge(c.flat_bank, c.at);
      bs.preventive_open = false;
      break;
    case CommandKind::ACT:
      ch_.activate(c.flat_bank, c.row, c.at, true);
      bs.preventive.pop_front();
      bs.preventive_open = true;
      ++preventive_refreshes_;
      break;
    case CommandKind::RD:
      ch_.read(c.flat_bank, c.at);
      --bs.extra_reads;
      ++extra_reads_;
      break;
    case CommandKind::WR:
      throw ProtocolError("maintenance never writes");
    case CommandKind::REF:
      ch_.refresh(rank, c.at);
      --rs.owed;
      rs.ref_draining = false;
      if (rs.last_ref != kLongAgo) max_ref_gap_ = std::max(max_ref_gap_, c.at - rs.last_ref);
      rs.last_ref = c.at;
      ++refs_;
      break;
    case CommandKind::RFMab:
      ch_.rfm(rank, c.at);
      for (int b = rank * per_rank_; b < (rank + 1) * per_rank_; ++b) banks_[b].prfm_count = 0;
      rs.prfm_pending = false;
      if (c.purpose == P::BackoffRfm) {
        ++backoff_rfms_;
        ++rs.rfms_this_recovery;
        if (!ch_.device().backoff(rank).asserted()) rs.backoff = Backoff::Idle;
      } else {
        ++prfm_rfms_;
      }
      break;
  }
}

void MaintenanceUnit::on_demand_activate(int flat_bank, std::int64_t row, Ps t) {
  const int rank = ch_.rank_of(flat_bank);
  RankState& rs = ranks_[rank];
  if (rs.backoff == Backoff::Window) {
    int& n = rs.window_acts[flat_bank - rank * per_rank_];
    max_window_acts_ = std::max(max_window_acts_, ++n);
  } else if (rs.backoff == Backoff::Recovery) {
    ++protocol_violations_;
  }
  if (prfm_ && ++banks_[flat_bank].prfm_count >= cfg_.rfm_th) rs.prfm_pending = true;
  if (!mitigation_) return;
  actions_.clear();
  mitigation_->observe_activation(flat_bank, row, t, actions_);
  for (const PreventiveAction& a : actions_) {
    BankState& target = banks_[a.flat_bank];
    if (a.kind == PreventiveAction::Kind::ExtraColumnAccess) {
      ++target.extra_reads;
      continue;
    }
    victims_of(a.row, ch_.geometry().rows_per_bank, ch_.device().config().blast_radius, scratch_);
    for (std::int64_t v : scratch_) target.preventive.push_back(v);
  }
}

nlohmann::json MaintenanceUnit::stats() const {
  nlohmann::json j{{"backoffs", backoffs_},
                   {"backoff_rfms", backoff_rfms_},
                   {"prfm_rfms", prfm_rfms_},
                   {"refs", refs_},
                   {"ref_postponements", postponements_},
                   {"max_ref_gap_ns", to_ns(max_ref_gap_)},
                   {"preventive_refreshes", preventive_refreshes_},
                   {"extra_counter_reads", extra_reads_},
                   {"max_window_acts_per_bank", max_window_acts_},
                   {"protocol_violations", protocol_violations_}};
  if (mitigation_) j["mechanism"] = mitigation_->stats();
  return j;
}

}  // namespace rdlab
