#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rdlab/analytic.hpp"

using namespace rdlab;

namespace {

// Row-by-row replay of the balanced wave game: a refresh lands after every
// `period` ACTs and takes `per_period` of the hottest live rows.
std::vector<std::int64_t> naive_rounds(std::int64_t r1, std::int64_t period, std::int64_t per_period) {
  std::vector<std::int64_t> count(static_cast<std::size_t>(r1), 0);
  std::vector<bool> alive(static_cast<std::size_t>(r1), true);
  std::vector<bool> refreshed(static_cast<std::size_t>(r1), false);
  std::vector<std::int64_t> out;
  std::int64_t acts = 0;
  for (;;) {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (refreshed[i]) alive[i] = false;
      n += alive[i];
    }
    out.push_back(n);
    if (n == 0) return out;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (!alive[i]) continue;
      ++count[i];
      if (++acts % period == 0) {
        for (std::int64_t k = 0; k < per_period; ++k) {
          std::size_t best = alive.size();
          for (std::size_t j = 0; j < alive.size(); ++j) {
            if (alive[j] && !refreshed[j] && (best == alive.size() || count[j] > count[best])) best = j;
          }
          if (best == alive.size()) break;
          refreshed[best] = true;
          count[best] = 0;
        }
      }
    }
  }
}

}  // namespace

TEST_CASE("PRFM rounds by hand") {
  CHECK(prfm_rounds(2, 8) == std::vector<std::int64_t>{8, 4, 2, 1, 1, 0});
  CHECK(prfm_rounds(1, 3) == std::vector<std::int64_t>{3, 0});
}

TEST_CASE("PRAC rounds by hand") {
  // Four ACTs per back-off with one refresh each.
  CHECK(a_normal(make_timing(true)) == 3);
  CHECK(prac_rounds(1, 1, 1, 6, make_timing(true)) ==
        std::vector<std::int64_t>{6, 5, 4, 3, 2, 1, 1, 1, 1, 0});
}

TEST_CASE("recurrence matches a row-by-row game") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int th = 1 + static_cast<int>(rng() % 9);
    const int r1 = 1 + static_cast<int>(rng() % 60);
    CHECK(prfm_rounds(th, r1) == naive_rounds(r1, th, 1));
    const int nbo = 1 + static_cast<int>(rng() % 4);
    CHECK(prac_rounds(1, nbo, nbo, r1, make_timing(true)) == naive_rounds(r1, nbo + 3, nbo));
  }
}

TEST_CASE("PRAC-4 worst case") {
  const Hammer h = prac_worst(1, 4, 4, make_timing(true));
  CHECK(h.max_hammer == 19);
  CHECK(h.r1 == 44017);
  CHECK(prac_max_hammer(1, 4, 4, 44017, make_timing(true)) == 19);
  const auto s = find_secure_config(Mechanism::PRAC, 19);
  CHECK_FALSE(s.has_value());
  const auto s20 = find_secure_config(Mechanism::PRAC, 20);
  REQUIRE(s20.has_value());
  CHECK(s20->worst == 19);
}

TEST_CASE("PRFM worst cases") {
  const TimingParams t = make_timing(false);
  CHECK(prfm_worst(2, t).max_hammer == 18);
  CHECK(prfm_worst(3, t).max_hammer == 29);
  CHECK(prfm_worst(4, t).max_hammer == 41);
  const auto s = find_secure_config(Mechanism::PRFM, 32);
  REQUIRE(s.has_value());
  CHECK(s->config.rfm_th == 3);
}

TEST_CASE("worst case grows with each knob") {
  const TimingParams t = make_timing(true);
  std::uint32_t prev = 0;
  for (std::uint32_t a : {1u, 2u, 4u, 8u, 16u}) {
    const std::uint32_t h = prac_worst(a, 4, 4, t).max_hammer;
    CHECK(h >= prev);
    prev = h;
  }
  prev = 0;
  for (std::uint32_t th : {1u, 2u, 4u, 8u, 16u}) {
    const std::uint32_t h = prfm_worst(th, make_timing(false)).max_hammer;
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("in-flight increment adds N_BO_R - 1") {
  const TimingParams t = make_timing(true);
  WaveOptions on;
  on.inflight_increment = true;
  CHECK(prac_worst(4, 2, 2, t, on).max_hammer == prac_worst(4, 2, 2, t).max_hammer + 1);
}

TEST_CASE("Chronus bound and table size") {
  CHECK(chronus_bound(16, 47000, 180000) == 19);
  CHECK(chronus_bound(1, 47000, 180000) == 4);
  CHECK(att_min_size(47000, 180000) == 4);
  CHECK(att_min_size(60000, 180000) == 4);
  CHECK(att_min_size(61000, 180000) == 3);
}

TEST_CASE("bandwidth bound fractions") {
  const Fraction a = dbc_prac(16, 1, 350000, 47000);
  CHECK(a.num == 175);
  CHECK(a.den == 551);
  CHECK(a.value() == doctest::Approx(0.3176).epsilon(1e-4));
  const Fraction b = dbc_prac(1, 4, 350000, 52000);
  CHECK(b.num == 350);
  CHECK(b.den == 363);
  CHECK(b.value() == doctest::Approx(0.9642).epsilon(1e-4));
}

TEST_CASE("bandwidth chain") {
  const DbcChain ok = dbc_chain(300000, 1000000, 16, 1, 350000, 47000);
  CHECK(ok.passes);
  const DbcChain bad = dbc_chain(500000, 1000000, 16, 1, 350000, 47000);
  CHECK_FALSE(bad.passes);
}

TEST_CASE("sweeps list one row per setting") {
  const auto prfm = sweep_prfm({1, 2, 3});
  REQUIRE(prfm.size() == 3);
  CHECK(prfm[2].max_hammer == 29);
  CHECK(prfm[2].secure_min_nrh == 30);
  const auto prac = sweep_prac({1, 2}, {1, 4}, 0);
  CHECK(prac.size() == 4);
}

TEST_CASE("bad parameters are rejected") {
  CHECK_THROWS(prfm_rounds(0, 5));
  CHECK_THROWS(prac_rounds(1, 0, 1, 5, make_timing(true)));
  CHECK_THROWS(dbc_prac(0, 1, 1, 1));
}
