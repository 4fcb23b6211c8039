#include "rdlab/controller.hpp"

#include <algorithm>

#include "rdlab/errors.hpp"

namespace rdlab {

void SchedulerConfig::validate() const {
  if (cap < 1) throw ConfigError("scheduler.cap must be >= 1");
  if (read_queue < 1 || write_queue < 1) throw ConfigError("queue sizes must be >= 1");
}

MemoryController::MemoryController(DramChannel& channel, MaintenanceUnit& maintenance,
                                   const SchedulerConfig& config, int cores)
    : ch_(channel),
      maint_(maintenance),
      cfg_(config),
      mapper_(config.mapping, channel.geometry()),
      hits_served_(static_cast<std::size_t>(channel.geometry().banks_per_channel()), 0),
      core_stats_(static_cast<std::size_t>(cores)) {
  config.validate();
}

bool MemoryController::can_accept(bool is_write) const {
  return is_write ? writes_.size() < cfg_.write_queue : reads_.size() < cfg_.read_queue;
}

std::uint64_t MemoryController::enqueue(int core, std::uint64_t address, bool is_write, Ps now) {
  if (!can_accept(is_write)) throw ProtocolError("request queue full");
  Request r;
  r.id = next_id_++;
  r.core = core;
  r.is_write = is_write;
  r.address = address;
  r.arrival = now;
  r.decoded = mapper_.decode(address);
  r.flat_bank = r.decoded.flat_bank(ch_.geometry());
  (is_write ? writes_ : reads_).push_back(r);
  (is_write ? core_stats_[core].writes : core_stats_[core].reads)++;
  return r.id;
}

bool MemoryController::completable(const Request& r, CommandKind kind, Ps at, Ps end) const {
  const TimingParams& t = ch_.timing();
  const Ps column_done = r.is_write ? t.tCWL + t.tBurst : t.tCL + t.tBurst;
  switch (kind) {
    case CommandKind::RD:
    case CommandKind::WR:
      return at + column_done <= end;
    case CommandKind::ACT:
      return at + t.tRCD + column_done <= end;
    case CommandKind::PRE:
      return at + t.tRP + t.tRCD + column_done <= end;
    default:
      return false;
  }
}

bool MemoryController::tick(Ps now) {
  const Ps clk = ch_.timing().clock_period;
  const int ranks = ch_.geometry().ranks;
  const int per = ch_.geometry().banks_per_rank();
  wake_ = kNever;
  maint_.advance(now);

  std::vector<bool> rank_demand(static_cast<std::size_t>(ranks), false);
  for (const auto* q : {&reads_, &writes_}) {
    for (const Request& r : *q) rank_demand[r.flat_bank / per] = true;
  }

  for (int rank = 0; rank < ranks; ++rank) {
    auto m = maint_.next(rank, now, rank_demand[rank]);
    if (!m) continue;
    m->at = ceil_to(m->at, clk);
    if (m->at <= now) {
      m->at = now;
      maint_.execute(*m);
      return true;
    }
    wake_ = std::min(wake_, m->at);
  }

  if (writes_.size() * 4 >= cfg_.write_queue * 3) draining_writes_ = true;
  if (draining_writes_ && writes_.size() * 4 <= cfg_.write_queue) draining_writes_ = false;
  std::deque<Request>& q = (draining_writes_ || reads_.empty()) ? writes_ : reads_;
  if (q.empty()) return false;

  const int banks = ch_.geometry().banks_per_channel();
  std::vector<char> pending_hit(static_cast<std::size_t>(banks), 0);
  std::vector<char> waiting_conflict(static_cast<std::size_t>(banks), 0);
  for (const Request& r : q) {
    const auto open = ch_.device().open_row(r.flat_bank);
    if (!open) continue;
    if (*open == r.decoded.row) {
      pending_hit[r.flat_bank] = 1;
    } else {
      waiting_conflict[r.flat_bank] = 1;
    }
  }

  std::vector<char> window_has_work(static_cast<std::size_t>(ranks), 0);
  Candidate best_hit;
  Candidate best_other;
  bool have_hit = false;
  bool have_other = false;

  for (std::size_t i = 0; i < q.size(); ++i) {
    const Request& r = q[i];
    const int bank = r.flat_bank;
    const int rank = bank / per;
    if (maint_.rank_draining(rank) || maint_.bank_busy(bank)) continue;
    const auto open = ch_.device().open_row(bank);
    CommandKind kind;
    bool hit = false;
    if (open && *open == r.decoded.row) {
      kind = r.is_write ? CommandKind::WR : CommandKind::RD;
      hit = true;
    } else if (open) {
      const bool capped = hits_served_[bank] >= cfg_.cap;
      if (pending_hit[bank] && !capped) continue;
      kind = CommandKind::PRE;
    } else {
      kind = CommandKind::ACT;
    }
    if (hit && hits_served_[bank] >= cfg_.cap && waiting_conflict[bank]) continue;
    Ps at = ceil_to(ch_.earliest(kind, bank, now), clk);
    if (maint_.in_window(rank)) {
      if (!completable(r, kind, at, maint_.window_end(rank))) {
        ++held_in_window_;
        continue;
      }
      window_has_work[rank] = 1;
    }
    wake_ = std::min(wake_, at);
    if (at > now) continue;
    if (hit) {
      if (!have_hit) {
        best_hit = Candidate{&q, i, kind, now};
        have_hit = true;
      }
    } else if (!have_other) {
      best_other = Candidate{&q, i, kind, now};
      have_other = true;
    }
    if (have_hit) break;
  }

  for (int rank = 0; rank < ranks; ++rank) {
    if (maint_.in_window(rank) && !window_has_work[rank]) maint_.close_window(rank);
  }

  if (have_hit) {
    issue(best_hit, now);
    return true;
  }
  if (have_other) {
    issue(best_other, now);
    return true;
  }
  return false;
}

void MemoryController::issue(const Candidate& c, Ps now) {
  Request& r = (*c.queue)[c.index];
  CoreMemStats& cs = core_stats_[r.core];
  const int bank = r.flat_bank;
  if (!r.classified) {
    r.classified = true;
    if (c.kind == CommandKind::PRE) {
      ++cs.row_conflicts;
    } else if (c.kind == CommandKind::ACT) {
      ++cs.row_misses;
    } else {
      ++cs.row_hits;
    }
  }
  switch (c.kind) {
    case CommandKind::PRE:
      ch_.precharge(bank, now);
      break;
    case CommandKind::ACT:
      ch_.activate(bank, r.decoded.row, now);
      r.activated = true;
      hits_served_[bank] = 0;
      maint_.on_demand_activate(bank, r.decoded.row, now);
      break;
    case CommandKind::RD:
    case CommandKind::WR: {
      if (c.kind == CommandKind::RD) {
        ch_.read(bank, now);
        const Ps t = now + ch_.timing().tCL + ch_.timing().tBurst;
        done_.push(Completion{r.id, r.core, t});
        cs.read_latency_ns_sum += to_ns(t - r.arrival);
      } else {
        ch_.write(bank, now);
      }
      if (!r.activated) ++hits_served_[bank];
      c.queue->erase(c.queue->begin() + static_cast<std::ptrdiff_t>(c.index));
      break;
    }
    default:
      throw ProtocolError("demand scheduler cannot issue rank commands");
  }
}

Ps MemoryController::next_wake(Ps now) const {
  Ps w = std::max(wake_, now + ch_.timing().clock_period);
  w = std::min(w, std::max(maint_.next_event(now), now + ch_.timing().clock_period));
  if (!done_.empty()) w = std::min(w, std::max(done_.top().t, now + 1));
  return w;
}

bool MemoryController::pop_completion(Ps now, Completion& out) {
  if (done_.empty() || done_.top().t > now) return false;
  out = done_.top();
  done_.pop();
  return true;
}

nlohmann::json MemoryController::stats() const {
  nlohmann::json cores = nlohmann::json::array();
  for (const auto& c : core_stats_) {
    cores.push_back({{"reads", c.reads},
                     {"writes", c.writes},
                     {"row_hits", c.row_hits},
                     {"row_misses", c.row_misses},
                     {"row_conflicts", c.row_conflicts},
                     {"avg_read_latency_ns", c.reads ? c.read_latency_ns_sum / c.reads : 0.0}});
  }
  return {{"cores", cores}, {"held_in_window", held_in_window_}};
}

}  // namespace rdlab
