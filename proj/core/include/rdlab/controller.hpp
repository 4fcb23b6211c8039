#pragma once

#include <cstdint>
#include <deque>
#include <queue>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/address.hpp"
#include "rdlab/channel.hpp"
#include "rdlab/maintenance.hpp"

namespace rdlab {

struct Request {
  std::uint64_t id = 0;
  int core = 0;
  bool is_write = false;
  std::uint64_t address = 0;
  Ps arrival = 0;
  DecodedAddress decoded;
  int flat_bank = 0;
  bool classified = false;
  bool activated = false;
};

struct SchedulerConfig {
  int cap = 4;
  std::size_t read_queue = 64;
  std::size_t write_queue = 64;
  Mapping mapping = Mapping::MOP;

  void validate() const;
};

struct Completion {
  std::uint64_t id = 0;
  int core = 0;
  Ps t = 0;
};

struct CoreMemStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  double read_latency_ns_sum = 0.0;
};

class MemoryController {
 public:
  MemoryController(DramChannel& channel, MaintenanceUnit& maintenance, const SchedulerConfig& config,
                   int cores);

  bool can_accept(bool is_write) const;
  // Decodes and queues; returns the request id.
  std::uint64_t enqueue(int core, std::uint64_t address, bool is_write, Ps now);

  // Issues at most one command at `now`. Returns true when a command went out.
  bool tick(Ps now);
  // Earliest time after `now` at which tick() could do something.
  Ps next_wake(Ps now) const;

  bool pop_completion(Ps now, Completion& out);
  Ps next_completion() const { return done_.empty() ? kNever : done_.top().t; }
  bool idle() const { return reads_.empty() && writes_.empty() && done_.empty(); }
  std::size_t pending() const { return reads_.size() + writes_.size(); }

  const AddressMapper& mapper() const { return mapper_; }
  const std::vector<CoreMemStats>& core_stats() const { return core_stats_; }
  nlohmann::json stats() const;

 private:
  struct Candidate {
    std::deque<Request>* queue = nullptr;
    std::size_t index = 0;
    CommandKind kind = CommandKind::ACT;
    Ps at = 0;
  };
  struct Later {
    bool operator()(const Completion& a, const Completion& b) const {
      return a.t != b.t ? a.t > b.t : a.id > b.id;
    }
  };

  bool completable(const Request& r, CommandKind kind, Ps at, Ps window_end) const;
  void issue(const Candidate& c, Ps now);

  DramChannel& ch_;
  MaintenanceUnit& maint_;
  SchedulerConfig cfg_;
  AddressMapper mapper_;
  std::deque<Request> reads_;
  std::deque<Request> writes_;
  std::priority_queue<Completion, std::vector<Completion>, Later> done_;
  std::vector<int> hits_served_;
  std::vector<CoreMemStats> core_stats_;
  std::uint64_t next_id_ = 1;
  bool draining_writes_ = false;
  Ps wake_ = kNever;
  std::uint64_t held_in_window_ = 0;
};

}  // namespace rdlab
