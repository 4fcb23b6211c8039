#include <doctest.h>

#include "rdlab/attack_bench.hpp"
#include "rdlab/channel.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/timing.hpp"

using namespace rdlab;

TEST_CASE("baseline DDR5 timing table") {
  const TimingParams t = make_timing(false);
  CHECK(t.tRC == 47000);
  CHECK(t.tRAS == 32000);
  CHECK(t.tRP == 15000);
  CHECK(t.tRTP == 7500);
  CHECK(t.tWR == 30000);
  CHECK(t.tRCD == 15000);
  CHECK(t.tRFM == 350000);
  CHECK(t.tABOact == 180000);
  CHECK(t.tREFW == 32'000'000'000);
  CHECK(t.tREFI == 3'900'000);
  CHECK(t.clock_period == 625);
  CHECK_FALSE(t.prac);
}

TEST_CASE("PRAC timing table") {
  const TimingParams t = make_timing(true);
  CHECK(t.tRC == 52000);
  CHECK(t.tRAS == 16000);
  CHECK(t.tRP == 36000);
  CHECK(t.tRTP == 5000);
  CHECK(t.tWR == 10000);
  CHECK(t.tRCD == 15000);
  CHECK(t.tRFM == 350000);
  CHECK(t.tABOact == 180000);
  CHECK(t.prac);
}

TEST_CASE("time helpers") {
  CHECK(from_ns(7.5) == 7500);
  CHECK(from_ns(-1.0) == -1000);
  CHECK(to_ns(56250) == doctest::Approx(56.25));
  CHECK(ceil_to(0, 625) == 0);
  CHECK(ceil_to(1, 625) == 625);
  CHECK(ceil_to(625, 625) == 625);
  CHECK(ceil_to(626, 625) == 1250);
}

TEST_CASE("timing overrides") {
  const TimingParams t = apply_overrides(make_timing(false), {{"tRC", 50.0}, {"tRFM", 280.0}});
  CHECK(t.tRC == 50000);
  CHECK(t.tRFM == 280000);
  CHECK(t.tRAS == 32000);
  CHECK_THROWS_AS(apply_overrides(make_timing(false), {{"tXYZ", 1.0}}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(make_timing(false), {{"tRC", -3.0}}), ConfigError);
}

TEST_CASE("earliest respects tRC between ACTs to one bank") {
  const TimingParams t = make_timing(false);
  TimingState s(t, 1, 32);
  s.record(CommandKind::ACT, 0, 0);
  CHECK(s.earliest(CommandKind::PRE, 0, 0) >= t.tRAS);
  s.record(CommandKind::PRE, 0, t.tRAS);
  CHECK(s.earliest(CommandKind::ACT, 0, 0) >= t.tRC);
  CHECK(s.earliest(CommandKind::ACT, 0, 0) >= t.tRAS + t.tRP);
}

namespace {

std::vector<CommandRecord> hammer_log(Mechanism m) {
  BenchConfig bc;
  bc.mitigation.mechanism = m;
  bc.mitigation.nrh = 64;
  bc.mitigation.aboth = 8;
  bc.mitigation.chronus_nbo = 8;
  bc.mitigation.rfm_th = 8;
  bc.keep_log = true;
  AttackBench bench(bc);
  for (int i = 0; i < 200; ++i) bench.hammer(i % 3, 16 + 5 * (i % 4));
  return bench.channel().log();
}

}  // namespace

TEST_CASE("schedule replay accepts what the channel issued") {
  const DeviceGeometry g;
  for (Mechanism m : {Mechanism::None, Mechanism::PRFM, Mechanism::Chronus}) {
    const auto log = hammer_log(m);
    REQUIRE(log.size() >= 600);
    CHECK(replay_check(log, make_timing(false), g).first_violation == -1);
  }
  const auto prac = hammer_log(Mechanism::PRAC);
  CHECK(replay_check(prac, make_timing(true), g).first_violation == -1);
}

TEST_CASE("schedule replay tells the two timing sets apart") {
  const DeviceGeometry g;
  CHECK(replay_check(hammer_log(Mechanism::Chronus), make_timing(true), g).first_violation >= 0);
  CHECK(replay_check(hammer_log(Mechanism::PRAC), make_timing(false), g).first_violation >= 0);
}

TEST_CASE("schedule replay finds a tampered command") {
  const DeviceGeometry g;
  auto log = hammer_log(Mechanism::None);
  long idx = -1;
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (log[i].kind == CommandKind::ACT && i > 10) {
      idx = static_cast<long>(i);
      break;
    }
  }
  REQUIRE(idx > 0);
  log[idx].t -= 5000;
  const ReplayResult r = replay_check(log, make_timing(false), g);
  CHECK(r.first_violation == idx);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("channel refuses an early command") {
  DramChannel ch(DeviceGeometry{}, make_timing(false), DeviceConfig{}, 1000);
  ch.activate(0, 10, 0);
  CHECK_THROWS_AS(ch.precharge(0, 625), ProtocolError);
}
