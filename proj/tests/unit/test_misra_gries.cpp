#include <doctest.h>

#include <map>
#include <random>

#include "rdlab/misra_gries.hpp"

using namespace rdlab;

TEST_CASE("Misra-Gries bounds against exact counts") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t cap = 1 + rng() % 12;
    MisraGriesTable mg(cap);
    std::map<std::uint64_t, std::uint64_t> exact;
    const int n = 2000;
    std::geometric_distribution<int> skew(0.15);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t key = static_cast<std::uint64_t>(skew(rng)) % 40;
      ++exact[key];
      mg.observe(key);
      CHECK(mg.size() <= cap);
    }
    CHECK(mg.stream_length() == static_cast<std::uint64_t>(n));
    CHECK(mg.spill() <= static_cast<std::uint64_t>(n) / (cap + 1));
    for (const auto& [key, count] : exact) {
      const std::uint64_t est = mg.estimate(key);
      if (mg.contains(key)) {
        CHECK(est >= count);
        CHECK(est - count <= mg.spill());
      } else {
        CHECK(count <= mg.spill());
        CHECK(est == mg.spill());
      }
    }
  }
}

TEST_CASE("Misra-Gries small stream by hand") {
  MisraGriesTable mg(2);
  CHECK(mg.observe(1) == 1);
  CHECK(mg.observe(1) == 2);
  CHECK(mg.observe(2) == 1);
  mg.observe(3);
  CHECK(mg.spill() == 1);
  CHECK(mg.estimate(1) >= 2);
  mg.clear();
  CHECK(mg.size() == 0);
  CHECK(mg.spill() == 0);
}
