#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "rdlab/errors.hpp"
#include "rdlab/trace.hpp"

using namespace rdlab;

namespace {

Trace parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in, "t");
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("trace lines") {
  const Trace t = parse("# header\n3 0x1000\n\n0 2040 W\n5 0xff w\n");
  REQUIRE(t.entries.size() == 3);
  CHECK(t.entries[0] == TraceEntry{3, 0x1000, false});
  CHECK(t.entries[1] == TraceEntry{0, 0x2040, true});
  CHECK(t.entries[2].is_write);
  CHECK(t.instructions() == 3 + 0 + 5 + 3);
}

TEST_CASE("trace errors carry the line number") {
  CHECK(error_line("1 0x10\n7\n") == 2);
  CHECK(error_line("1 0x10 W extra\n") == 1);
  CHECK(error_line("1 0x10\nx 0x20\n") == 2);
  CHECK(error_line("1 0xzz\n") == 1);
  CHECK(error_line("1 0x10 R\n") == 1);
  CHECK(error_line("# only a comment\n") > 0);
  CHECK(error_line("-1 0x10\n") == 1);
}

TEST_CASE("trace save and load round trip") {
  const Trace t = gen_synthetic(Intensity::M, 500, 9, DeviceGeometry{}.capacity_bytes());
  const auto path = std::filesystem::temp_directory_path() / "rdlab_trace_roundtrip.trace";
  save_trace(t, path.string());
  const Trace back = load_trace(path.string());
  std::filesystem::remove(path);
  CHECK(back.entries == t.entries);
  CHECK_THROWS(load_trace("/nonexistent/rdlab.trace"));
}

TEST_CASE("synthetic traces are deterministic per seed") {
  const auto cap = DeviceGeometry{}.capacity_bytes();
  CHECK(gen_synthetic(Intensity::H, 300, 4, cap).entries ==
        gen_synthetic(Intensity::H, 300, 4, cap).entries);
  CHECK(gen_synthetic(Intensity::H, 300, 4, cap).entries !=
        gen_synthetic(Intensity::H, 300, 5, cap).entries);
  for (const auto& e : gen_synthetic(Intensity::L, 300, 1, cap).entries) CHECK(e.address < cap);
}

TEST_CASE("workload mixes") {
  const auto mixes = workload_mixes("HHHH", 3);
  REQUIRE(mixes.size() == 3);
  CHECK(mixes[0].seed != mixes[1].seed);
  const auto traces = build_mix(mixes[0], 100, DeviceGeometry{}.capacity_bytes());
  CHECK(traces.size() == 4);
  for (const auto& t : traces) CHECK(t.intensity == Intensity::H);
  CHECK_THROWS(workload_mixes("HQ"));
}

TEST_CASE("perf-attack trace stays in rank 0 and bypasses the cache") {
  const AddressMapper mapper(Mapping::MOP, DeviceGeometry{});
  const Trace t = gen_perf_attack(mapper, 8, 4, 256);
  CHECK(t.bypass_cache);
  CHECK(t.intensity == Intensity::Attack);
  for (const auto& e : t.entries) CHECK(mapper.decode(e.address).rank == 0);
}
