#include "rdlab/decrementer.hpp"

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Static CMOS cells.
constexpr int kNotT = 2;
constexpr int kNandT = 4;
constexpr int kNorT = 4;
constexpr int kMuxT = 8;

struct Netlist {
  GateCost cost;

  bool inv(bool a) {
    ++cost.not_gates;
    cost.transistors += kNotT;
    return !a;
  }
  bool nand(bool a, bool b) {
    ++cost.nand;
    cost.transistors += kNandT;
    return !(a && b);
  }
  bool nor(bool a, bool b) {
    ++cost.nor;
    cost.transistors += kNorT;
    return !(a || b);
  }
  bool mux(bool sel, bool when_true, bool when_false) {
    ++cost.mux;
    cost.transistors += kMuxT;
    return sel ? when_true : when_false;
  }
};

std::uint8_t run(std::uint8_t x, GateCost* cost) {
  Netlist n;
  bool xb[8];
  bool xn[8];
  for (int i = 0; i < 8; ++i) {
    xb[i] = (x >> i) & 1;
    xn[i] = n.inv(xb[i]);
  }
  bool y[8];
  y[0] = xn[0];
  y[1] = n.mux(xb[0], xb[1], xn[1]);
  y[2] = n.mux(n.nor(xb[0], xb[1]), xn[2], xb[2]);
  for (int i = 3; i < 8; ++i) {
    y[i] = n.mux(n.nand(y[i - 1], xn[i - 1]), xb[i], xn[i]);
  }
  std::uint8_t out = 0;
  for (int i = 0; i < 8; ++i) out |= static_cast<std::uint8_t>(y[i] << i);
  if (cost) *cost = n.cost;
  return out;
}

}  // namespace

std::uint8_t decrement8(std::uint8_t x) { return run(x, nullptr); }

std::uint8_t decrement8_arith(std::uint8_t x) { return static_cast<std::uint8_t>(x - 1); }

GateCost decrementer_cost() {
  GateCost cost;
  run(0, &cost);
  return cost;
}

CounterFootprint counter_subarray_footprint(const DeviceGeometry& geometry, int counter_bits) {
  if (counter_bits < 1) throw ConfigError("counter_bits must be >= 1");
  const auto rows = static_cast<std::uint64_t>(geometry.rows_per_bank);
  const auto row_bits = static_cast<std::uint64_t>(geometry.row_size_bits);
  const std::uint64_t bits = rows * static_cast<std::uint64_t>(counter_bits);
  CounterFootprint f;
  f.bytes_per_bank = (bits + 7) / 8;
  f.rows_needed = (bits + row_bits - 1) / row_bits;
  f.capacity_overhead = static_cast<double>(f.rows_needed) / static_cast<double>(rows);
  return f;
}

}  // namespace rdlab
