#pragma once

#include <cstdint>

#include "rdlab/geometry.hpp"

namespace rdlab {

// Gate-level network of the counter-subarray decrementer.
std::uint8_t decrement8(std::uint8_t x);
std::uint8_t decrement8_arith(std::uint8_t x);

struct GateCost {
  int not_gates = 0;
  int mux = 0;
  int nand = 0;
  int nor = 0;
  int transistors = 0;

  int gates() const { return not_gates + mux + nand + nor; }
};

GateCost decrementer_cost();

struct CounterFootprint {
  std::uint64_t bytes_per_bank = 0;
  std::uint64_t rows_needed = 0;
  double capacity_overhead = 0.0;
};

CounterFootprint counter_subarray_footprint(const DeviceGeometry& geometry, int counter_bits);

}  // namespace rdlab
