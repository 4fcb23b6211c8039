#include <doctest.h>

#include "rdlab/metrics.hpp"
#include "rdlab/storage.hpp"

using namespace rdlab;

TEST_CASE("weighted speedup and max slowdown") {
  CHECK(weighted_speedup({1.0, 2.0}, {2.0, 2.0}) == doctest::Approx(1.5));
  CHECK(max_slowdown({1.0, 1.0}, {1.0, 1.0}) == doctest::Approx(0.0));
  CHECK(max_slowdown({0.0, 1.0}, {1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(max_slowdown({0.5, 0.9}, {1.0, 1.0}) == doctest::Approx(0.5));
  CHECK_THROWS(weighted_speedup({1.0}, {1.0, 1.0}));
  CHECK_THROWS(weighted_speedup({}, {}));
}

TEST_CASE("energy charges ACTs once and scales them under Chronus") {
  CommandCounts c;
  c[CommandKind::ACT] = 1000;
  c[CommandKind::PRE] = 1000;
  c[CommandKind::RD] = 10;
  c[CommandKind::RFMab] = 2;
  const EnergyWeights w;
  const EnergyBreakdown plain = energy(c, w, false);
  const EnergyBreakdown chronus = energy(c, w, true);
  CHECK(plain.act == doctest::Approx(2000.0));
  CHECK(plain.rfm == doctest::Approx(100.0));
  CHECK(chronus.act / plain.act - 1.0 == doctest::Approx(0.1907));
  CHECK(chronus.rd == plain.rd);
  CHECK(plain.total() == doctest::Approx(2000.0 + 12.0 + 100.0));
}

TEST_CASE("command counts add") {
  CommandCounts a, b;
  a[CommandKind::ACT] = 3;
  b[CommandKind::ACT] = 4;
  b.preventive_acts = 1;
  a += b;
  CHECK(a[CommandKind::ACT] == 7);
  CHECK(a.preventive_acts == 1);
}

namespace {

DeviceGeometry storage_geometry() {
  DeviceGeometry g;
  g.rows_per_bank = 128 * 1024;
  return g;
}

}  // namespace

TEST_CASE("on-DRAM counter storage matches PRAC") {
  const DeviceGeometry g = storage_geometry();
  const StorageBytes c = storage_model(Mechanism::Chronus, 1000, g);
  const StorageBytes p = storage_model(Mechanism::PRAC, 20, g, make_timing(true));
  CHECK(c.dram == 64.0 * 128 * 1024);
  CHECK(c.dram / g.banks_per_channel() == 128.0 * 1024);
  CHECK(c.dram == p.dram);
  CHECK(storage_model(Mechanism::Chronus, 20, g).dram == c.dram);
  CHECK(c.cpu() == 0.0);
}

TEST_CASE("Graphene tracker grows as N_RH falls") {
  const DeviceGeometry g = storage_geometry();
  const StorageBytes lo = storage_model(Mechanism::Graphene, 1000, g);
  const StorageBytes hi = storage_model(Mechanism::Graphene, 20, g);
  const double ratio = static_cast<double>(hi.entries) / static_cast<double>(lo.entries);
  CHECK(ratio == doctest::Approx(50.0).epsilon(0.02));
  CHECK(hi.cpu() > lo.cpu());
}

TEST_CASE("Misra-Gries sizing") {
  const TimingParams t = make_timing(false);
  const std::uint64_t w = act_budget_per_window(t);
  CHECK(misra_gries_entries(1000, t) == (w + 499) / 500);
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(65536) == 16);
}
