#include <doctest.h>

#include <random>

#include "rdlab/address.hpp"
#include "rdlab/errors.hpp"

using namespace rdlab;

TEST_CASE("address mappings are bijections") {
  const DeviceGeometry g;
  for (Mapping m : {Mapping::RoBaRaCoCh, Mapping::MOP, Mapping::ABACuS}) {
    const AddressMapper mapper(m, g);
    CHECK(mapper.capacity() == g.capacity_bytes());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t line = (rng() % mapper.capacity()) & ~std::uint64_t{63};
      const DecodedAddress d = mapper.decode(line);
      CHECK(d.row < g.rows_per_bank);
      CHECK(d.column < g.columns_per_row());
      CHECK(mapper.encode(d) == line);
    }
  }
}

TEST_CASE("consecutive lines under MOP") {
  const AddressMapper mop(Mapping::MOP, DeviceGeometry{});
  const DecodedAddress a = mop.decode(0);
  const DecodedAddress b = mop.decode(64);
  const DecodedAddress c = mop.decode(4 * 64);
  CHECK(a.row == b.row);
  CHECK(a.flat_bank(DeviceGeometry{}) == b.flat_bank(DeviceGeometry{}));
  CHECK(c.bank_group != a.bank_group);
}

TEST_CASE("mapping names") {
  CHECK(parse_mapping("MOP") == Mapping::MOP);
  CHECK(to_string(Mapping::ABACuS) == "ABACuS");
  CHECK_THROWS_AS(parse_mapping("bogus"), ConfigError);
}
