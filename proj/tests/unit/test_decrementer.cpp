#include <doctest.h>

#include "rdlab/decrementer.hpp"
#include "rdlab/errors.hpp"

using namespace rdlab;

TEST_CASE("gate-level decrementer on every input") {
  int mismatches = 0;
  for (int x = 0; x < 256; ++x) {
    const auto in = static_cast<std::uint8_t>(x);
    const auto want = static_cast<std::uint8_t>((x + 255) % 256);
    mismatches += decrement8(in) != want;
    mismatches += decrement8_arith(in) != want;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("decrementer gate cost") {
  const GateCost c = decrementer_cost();
  CHECK(c.not_gates == 8);
  CHECK(c.mux == 7);
  CHECK(c.nand == 5);
  CHECK(c.nor == 1);
  CHECK(c.gates() == 21);
  CHECK(c.transistors == 96);
}

TEST_CASE("counter subarray footprint") {
  DeviceGeometry g;
  g.rows_per_bank = 128 * 1024;
  const CounterFootprint f = counter_subarray_footprint(g, 8);
  CHECK(f.bytes_per_bank == 128 * 1024);
  CHECK(f.rows_needed == 64);
  CHECK(f.capacity_overhead * 100.0 == doctest::Approx(0.05).epsilon(0.03));
  CHECK_THROWS_AS(counter_subarray_footprint(g, 0), ConfigError);
}
