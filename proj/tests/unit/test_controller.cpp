#include <doctest.h>

#include "rdlab/cache.hpp"
#include "rdlab/controller.hpp"
#include "rdlab/errors.hpp"

using namespace rdlab;

namespace {

struct Rig {
  DeviceGeometry g;
  DramChannel ch{g, make_timing(false), DeviceConfig{}, 1000, true};
  MaintenanceUnit maint{ch, MitigationConfig{}, RefreshConfig{false, 4}, 0};
  MemoryController ctrl;

  explicit Rig(int cap) : ctrl(ch, maint, SchedulerConfig{cap, 64, 64, Mapping::MOP}, 1) {}

  void drain() {
    Ps now = 0;
    const Ps clk = ch.timing().clock_period;
    Completion c;
    for (int guard = 0; guard < 100000 && !ctrl.idle(); ++guard) {
      while (ctrl.pop_completion(now, c)) {
      }
      ctrl.tick(now);
      now += clk;
    }
    REQUIRE(ctrl.idle());
  }
};

std::uint64_t addr(const AddressMapper& m, std::int64_t row, int column) {
  DecodedAddress d;
  d.row = row;
  d.column = column;
  return m.encode(d);
}

}  // namespace

TEST_CASE("row hits are capped ahead of an older conflict") {
  for (int cap : {1, 2, 4}) {
    Rig rig(cap);
    const AddressMapper& m = rig.ctrl.mapper();
    rig.ctrl.enqueue(0, addr(m, 1, 0), false, 0);
    rig.ctrl.enqueue(0, addr(m, 2, 0), false, 0);
    for (int i = 1; i <= 8; ++i) rig.ctrl.enqueue(0, addr(m, 1, i), false, 0);
    rig.drain();
    int reads_before = 0;
    int acts = 0;
    for (const auto& r : rig.ch.log()) {
      if (r.kind == CommandKind::ACT && ++acts == 2) {
        CHECK(r.row == 2);
        break;
      }
      if (r.kind == CommandKind::RD) ++reads_before;
    }
    CHECK(reads_before == 1 + cap);
    CHECK(replay_check(rig.ch.log(), rig.ch.timing(), rig.g).first_violation == -1);
  }
}

TEST_CASE("every request completes") {
  Rig rig(4);
  const AddressMapper& m = rig.ctrl.mapper();
  for (int i = 0; i < 40; ++i) rig.ctrl.enqueue(0, addr(m, i % 5, i % 7), i % 3 == 0, 0);
  rig.drain();
  const CoreMemStats& s = rig.ctrl.core_stats()[0];
  CHECK(s.reads + s.writes == 40);
  CHECK(s.row_hits + s.row_misses + s.row_conflicts == 40);
}

TEST_CASE("scheduler config validation") {
  SchedulerConfig c;
  c.cap = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("LLC hits, LRU eviction and write-back") {
  CacheConfig cfg;
  cfg.size_bytes = 4 * 64;
  cfg.ways = 2;
  Cache c(cfg);
  // Two sets; lines 0, 2, 4 share set 0.
  CHECK_FALSE(c.access(0 * 64, true).hit);
  CHECK_FALSE(c.access(2 * 64, false).hit);
  CHECK(c.access(0 * 64, false).hit);
  CHECK(c.miss_evicts_dirty(4 * 64) == false);
  const auto out = c.access(4 * 64, false);
  CHECK_FALSE(out.hit);
  CHECK_FALSE(out.writeback.has_value());
  CHECK_FALSE(c.probe(2 * 64));
  CHECK(c.miss_evicts_dirty(6 * 64));
  const auto wb = c.access(6 * 64, false);
  REQUIRE(wb.writeback.has_value());
  CHECK(*wb.writeback == 0);
  CHECK(c.hits() == 1);
  CHECK(c.misses() == 4);
  CHECK(c.writebacks() == 1);
}
