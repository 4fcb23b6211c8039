#include "rdlab/system.hpp"

#include <algorithm>
#include <deque>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

struct Segment {
  std::uint32_t count = 0;
  bool pending = false;
  std::uint64_t req = 0;
  Ps ready = 0;
};

class Core {
 public:
  Core(int id, const Trace& trace, const CoreConfig& cfg, std::uint64_t target)
      : id_(id), trace_(trace), cfg_(cfg), target_(target) {
    if (trace.entries.empty()) throw ConfigError("trace " + trace.name + " is empty");
    bubbles_left_ = trace.entries[0].bubbles;
  }

  template <typename Issue>
  void step(Ps now, Issue&& issue) {
    blocked_on_queue_ = false;
    bool progress = retire(now);
    int budget = cfg_.width;
    while (budget > 0 && occ_ < cfg_.window) {
      if (bubbles_left_ > 0) {
        const std::uint32_t take = std::min<std::uint64_t>(
            {static_cast<std::uint64_t>(budget), bubbles_left_,
             static_cast<std::uint64_t>(cfg_.window - occ_)});
        push_ready(take, 0);
        bubbles_left_ -= take;
        budget -= static_cast<int>(take);
        progress = true;
        continue;
      }
      const TraceEntry& e = trace_.entries[pos_];
      Segment s;
      s.count = 1;
      if (!issue(id_, e, trace_.bypass_cache, now, s)) {
        blocked_on_queue_ = true;
        break;
      }
      window_.push_back(s);
      ++occ_;
      --budget;
      progress = true;
      pos_ = (pos_ + 1) % trace_.entries.size();
      bubbles_left_ = trace_.entries[pos_].bubbles;
    }
    fast_forward(now);
    schedule_next(now, progress);
  }

  void complete(std::uint64_t req, Ps now) {
    for (auto& s : window_) {
      if (s.pending && s.req == req) {
        s.pending = false;
        s.ready = now;
        next_ = std::min(next_, now);
        return;
      }
    }
  }

  void poke(Ps now) {
    if (blocked_on_queue_) next_ = std::min(next_, now + cfg_.period);
  }

  Ps next() const { return next_; }
  bool finished() const { return finish_ >= 0; }
  Ps finish() const { return finish_; }
  std::uint64_t retired() const { return retired_; }

 private:
  bool retire(Ps now) {
    int budget = cfg_.width;
    bool any = false;
    while (budget > 0 && !window_.empty()) {
      Segment& s = window_.front();
      if (s.pending || s.ready > now) break;
      const std::uint32_t take = std::min<std::uint32_t>(static_cast<std::uint32_t>(budget), s.count);
      s.count -= take;
      occ_ -= static_cast<int>(take);
      budget -= static_cast<int>(take);
      note_retired(take, now);
      any = true;
      if (s.count == 0) window_.pop_front();
    }
    return any;
  }

  void note_retired(std::uint64_t n, Ps now) {
    retired_ += n;
    if (finish_ < 0 && retired_ >= target_) finish_ = now;
  }

  void push_ready(std::uint32_t n, Ps ready) {
    if (!window_.empty() && !window_.back().pending && window_.back().ready == ready) {
      window_.back().count += n;
    } else {
      window_.push_back(Segment{n, false, 0, ready});
    }
    occ_ += static_cast<int>(n);
  }

  // Steady state with nothing outstanding: retire and refill `width` per cycle.
  void fast_forward(Ps& now) {
    if (occ_ < cfg_.width || bubbles_left_ < 2ull * cfg_.width) return;
    for (const auto& s : window_) {
      if (s.pending || s.ready > now) return;
    }
    std::uint64_t k = bubbles_left_ / cfg_.width - 1;
    if (finish_ < 0) {
      const std::uint64_t room = target_ > retired_ ? (target_ - retired_) / cfg_.width : 0;
      k = std::min(k, room);
    }
    if (k == 0) return;
    const std::uint64_t n = k * cfg_.width;
    window_.clear();
    window_.push_back(Segment{static_cast<std::uint32_t>(occ_), false, 0, 0});
    bubbles_left_ -= n;
    now += static_cast<Ps>(k) * cfg_.period;
    note_retired(n, now);
  }

  void schedule_next(Ps now, bool progress) {
    const Ps tick = now + cfg_.period;
    if (progress) {
      next_ = tick;
      return;
    }
    if (!window_.empty() && !window_.front().pending) {
      next_ = std::max(tick, window_.front().ready);
      return;
    }
    if (occ_ < cfg_.window && !blocked_on_queue_) {
      next_ = tick;
      return;
    }
    next_ = kNever;
  }

  int id_;
  const Trace& trace_;
  CoreConfig cfg_;
  std::uint64_t target_;
  std::deque<Segment> window_;
  int occ_ = 0;
  std::size_t pos_ = 0;
  std::uint64_t bubbles_left_ = 0;
  std::uint64_t retired_ = 0;
  Ps finish_ = -1;
  Ps next_ = 0;
  bool blocked_on_queue_ = false;
};

}  // namespace

std::vector<double> SystemResult::ipcs() const {
  std::vector<double> v;
  for (const auto& c : cores) v.push_back(c.ipc);
  return v;
}

nlohmann::json SystemResult::to_json() const {
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : cores) {
    cj.push_back({{"trace", c.trace},
                  {"instructions", c.instructions},
                  {"finish_ns", to_ns(c.finish)},
                  {"ipc", c.ipc},
                  {"rbmpki", c.rbmpki}});
  }
  nlohmann::json cmds;
  for (CommandKind k : kAllCommands) cmds[std::string(to_string(k))] = counts.by_kind[static_cast<int>(k)];
  cmds["preventive_act"] = counts.preventive_acts;
  return {{"cores", cj},
          {"elapsed_ns", to_ns(elapsed)},
          {"timed_out", timed_out},
          {"commands", cmds},
          {"energy",
           {{"act", energy.act},
            {"rd", energy.rd},
            {"wr", energy.wr},
            {"ref", energy.ref},
            {"rfm", energy.rfm},
            {"total", energy.total()}}},
          {"oracle", {{"max_exposure", max_exposure}, {"violations", violations}}},
          {"backoffs", backoffs},
          {"rfms", rfms},
          {"rfm_busy_ns", to_ns(rfm_busy)},
          {"max_ref_gap_ns", to_ns(max_ref_gap)},
          {"max_window_acts_per_bank", max_window_acts},
          {"protocol_violations", protocol_violations},
          {"controller", controller},
          {"maintenance", maintenance}};
}

SystemResult run_system(const SystemConfig& config, const std::vector<Trace>& traces) {
  if (traces.empty()) throw ConfigError("at least one trace is required");
  config.geometry.validate();
  config.timing.validate();
  config.mitigation.validate();
  config.energy.validate();

  DramChannel channel(config.geometry, config.timing, device_config_for(config.mitigation),
                      config.mitigation.nrh, config.keep_log);
  MaintenanceUnit maint(channel, config.mitigation, config.refresh, config.seed);
  MemoryController ctrl(channel, maint, config.scheduler, static_cast<int>(traces.size()));
  Cache llc(config.cache);
  const std::uint64_t capacity = ctrl.mapper().capacity();
  for (const auto& t : traces) {
    for (const auto& e : t.entries) {
      if (e.address >= capacity) throw ConfigError("trace " + t.name + " has an address beyond capacity");
    }
  }

  std::vector<Core> cores;
  cores.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i)
    cores.emplace_back(static_cast<int>(i), traces[i], config.core, config.instructions);

  const Ps llc_latency = config.core.llc_latency;
  auto issue = [&](int core, const TraceEntry& e, bool bypass, Ps now, Segment& s) -> bool {
    if (config.cache.enabled && !bypass) {
      if (llc.probe(e.address)) {
        llc.access(e.address, e.is_write);
        s.ready = e.is_write ? 0 : now + llc_latency;
        return true;
      }
      if (!ctrl.can_accept(false)) return false;
      if (llc.miss_evicts_dirty(e.address) && !ctrl.can_accept(true)) return false;
      const Cache::Outcome out = llc.access(e.address, e.is_write);
      if (out.writeback) ctrl.enqueue(core, *out.writeback, true, now);
      const std::uint64_t id = ctrl.enqueue(core, e.address, false, now);
      if (!e.is_write) {
        s.pending = true;
        s.req = id;
      }
      return true;
    }
    if (!ctrl.can_accept(e.is_write)) return false;
    const std::uint64_t id = ctrl.enqueue(core, e.address, e.is_write, now);
    if (!e.is_write) {
      s.pending = true;
      s.req = id;
    }
    return true;
  };

  const Ps clk = config.timing.clock_period;
  Ps now = 0;
  Ps ctrl_next = 0;
  SystemResult res;
  for (;;) {
    Completion c;
    while (ctrl.pop_completion(now, c)) cores[c.core].complete(c.id, now);

    bool all_done = true;
    for (auto& core : cores) {
      if (core.next() <= now) {
        const std::size_t before = ctrl.pending();
        core.step(now, issue);
        if (ctrl.pending() != before) ctrl_next = std::min(ctrl_next, ceil_to(now, clk));
      }
      all_done = all_done && core.finished();
    }
    if (all_done) break;
    if (now > config.max_time) {
      res.timed_out = true;
      break;
    }

    if (ctrl_next <= now) {
      if (ctrl.tick(now)) {
        ctrl_next = now + clk;
        for (auto& core : cores) core.poke(now);
      } else {
        ctrl_next = std::max(ceil_to(ctrl.next_wake(now), clk), now + clk);
      }
    }

    Ps next = ctrl_next;
    for (const auto& core : cores) next = std::min(next, core.next());
    next = std::min(next, ctrl.next_completion());
    if (next == kNever) throw ProtocolError("simulation stalled with no pending events");
    now = std::max(next, now + 1);
  }

  res.elapsed = now;
  const auto& mem = ctrl.core_stats();
  for (std::size_t i = 0; i < cores.size(); ++i) {
    CoreResult r;
    r.trace = traces[i].name;
    r.instructions = std::min<std::uint64_t>(cores[i].retired(), config.instructions);
    const Ps finish = cores[i].finished() ? cores[i].finish() : now;
    r.finish = finish;
    const double cycles = static_cast<double>(finish) / static_cast<double>(config.core.period);
    r.ipc = cycles > 0 ? static_cast<double>(r.instructions) / cycles : 0.0;
    const double rbm = static_cast<double>(mem[i].row_misses + mem[i].row_conflicts);
    r.rbmpki = cores[i].retired() ? rbm * 1000.0 / static_cast<double>(cores[i].retired()) : 0.0;
    res.cores.push_back(r);
  }
  res.counts = channel.counts();
  res.energy = energy(res.counts, config.energy, uses_chronus_counters(config.mitigation.mechanism));
  res.max_exposure = channel.oracle().max_exposure();
  res.violations = channel.oracle().violation_count();
  res.backoffs = maint.backoffs();
  res.rfms = res.counts.by_kind[static_cast<int>(CommandKind::RFMab)];
  for (int r = 0; r < config.geometry.ranks; ++r) res.rfm_busy += channel.rfm_busy(r);
  res.max_ref_gap = maint.max_ref_gap();
  res.max_window_acts = maint.max_window_acts_per_bank();
  res.protocol_violations = maint.protocol_violations();
  res.controller = ctrl.stats();
  res.maintenance = maint.stats();
  if (config.keep_log) res.log = channel.log();
  if (config.dump_device) res.device_dump = channel.device().dump();
  return res;
}

}  // namespace rdlab
