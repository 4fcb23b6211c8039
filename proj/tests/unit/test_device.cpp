#include <doctest.h>

#include <algorithm>

#include "rdlab/device.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/oracle.hpp"

using namespace rdlab;

namespace {

DeviceConfig prac_config(std::uint32_t aboth, int nbo_r) {
  DeviceConfig c;
  c.counters = CounterMode::PracOnPrecharge;
  c.policy = BackoffPolicy::Prac;
  c.threshold = aboth;
  c.nbo_r = nbo_r;
  c.nbo_a = nbo_r;
  return c;
}

void act_pre(DramDevice& d, int bank, std::int64_t row, int times, Ps& t) {
  for (int i = 0; i < times; ++i) {
    d.on_activate(bank, row, t);
    t += 50000;
    d.on_precharge(bank, t);
    t += 50000;
  }
}

}  // namespace

TEST_CASE("victims are clamped at bank edges") {
  std::vector<std::int64_t> v;
  victims_of(0, 100, 2, v);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<std::int64_t>{1, 2});
  victims_of(50, 100, 2, v);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<std::int64_t>{48, 49, 51, 52});
  victims_of(99, 100, 1, v);
  CHECK(v == std::vector<std::int64_t>{98});
}

TEST_CASE("PRAC counters count on precharge") {
  DramDevice d(DeviceGeometry{}, prac_config(1000, 1));
  Ps t = 0;
  d.on_activate(0, 7, t);
  CHECK(d.activation_count(0, 7) == 0);
  d.on_precharge(0, 50000);
  CHECK(d.activation_count(0, 7) == 1);
  CHECK_FALSE(d.open_row(0).has_value());
}

TEST_CASE("PRAC RFM takes the hottest row of each bank") {
  DramDevice d(DeviceGeometry{}, prac_config(1000, 1));
  Ps t = 0;
  act_pre(d, 0, 100, 3, t);
  act_pre(d, 0, 200, 9, t);
  act_pre(d, 0, 300, 9, t);
  act_pre(d, 1, 50, 2, t);
  const auto done = d.on_rfm(0, t);
  REQUIRE(done.size() == 2);
  CHECK(done[0].flat_bank == 0);
  CHECK(done[0].aggressor == 200);
  CHECK(done[1].aggressor == 50);
  CHECK(d.activation_count(0, 200) == 0);
  const auto again = d.on_rfm(0, t + 400000);
  CHECK(again[0].aggressor == 300);
  const auto third = d.on_rfm(0, t + 800000);
  CHECK(third[0].aggressor == 100);
}

TEST_CASE("RFM with an open bank is a protocol error") {
  DramDevice d(DeviceGeometry{}, prac_config(1000, 1));
  d.on_activate(3, 10, 0);
  CHECK_THROWS_AS(d.on_rfm(0, 100000), ProtocolError);
}

TEST_CASE("PRAC back-off asserts at the threshold and clears after N_BO_R RFMs") {
  DramDevice d(DeviceGeometry{}, prac_config(3, 2));
  Ps t = 0;
  act_pre(d, 0, 10, 2, t);
  CHECK(d.backoff(0).phase == BackoffPhase::Idle);
  d.on_activate(0, 10, t);
  t += 50000;
  CHECK(d.on_precharge(0, t));
  CHECK(d.backoff(0).asserted());
  CHECK(d.alert_visible(0, t + d.config().alert_latency));
  d.on_rfm(0, t + 200000);
  CHECK(d.backoff(0).phase == BackoffPhase::Recovery);
  d.on_rfm(0, t + 600000);
  CHECK(d.backoff(0).phase == BackoffPhase::Delay);
}

TEST_CASE("Chronus counters flag a hot row on the N_BO-th activation") {
  DeviceConfig c;
  c.counters = CounterMode::ChronusCcu;
  c.policy = BackoffPolicy::Chronus;
  c.threshold = 4;
  c.nbo_r = 1;
  DramDevice d(DeviceGeometry{}, c);
  Ps t = 0;
  bool hot = false;
  for (int i = 0; i < 4; ++i) {
    hot = d.on_activate(0, 33, t);
    CHECK(d.activation_count(0, 33) == static_cast<std::uint32_t>(i + 1));
    t += 50000;
    d.on_precharge(0, t);
    t += 50000;
    if (i < 3) CHECK_FALSE(hot);
  }
  CHECK(hot);
  CHECK(d.att(0).contains(33));
  const auto done = d.on_rfm(0, t + 200000);
  REQUIRE(done.size() == 1);
  CHECK(done[0].aggressor == 33);
  CHECK(d.activation_count(0, 33) == 0);
}

TEST_CASE("safety oracle charges each aggressor separately") {
  SafetyOracle o(1000, 2, 3);
  o.on_activate(0, 10, 0);
  o.on_activate(0, 10, 0);
  o.on_activate(0, 12, 0);
  CHECK(o.exposure_of(0, 10) == 2);
  CHECK(o.exposure_of(0, 12) == 1);
  CHECK(o.clean());
  o.on_refresh(0, 11);
  o.on_refresh(0, 9);
  o.on_refresh(0, 8);
  o.on_activate(0, 10, 0);
  // Row 12 still remembers two hits from 10.
  CHECK(o.exposure_of(0, 10) == 3);
  CHECK_FALSE(o.clean());
  CHECK(o.violations().front().victim == 12);
  CHECK(o.max_exposure() == 3);
  CHECK(o.activations() == 4);
}
