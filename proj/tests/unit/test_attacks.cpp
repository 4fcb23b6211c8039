#include <doctest.h>

#include "rdlab/analytic.hpp"
#include "rdlab/attacks.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/experiment.hpp"

using namespace rdlab;

TEST_CASE("simulated PRFM wave follows the recurrence") {
  MitigationConfig c;
  c.mechanism = Mechanism::PRFM;
  c.nrh = 1000;
  for (std::uint32_t th : {1u, 2u, 3u, 5u}) {
    c.rfm_th = th;
    WaveSpec w;
    w.r1 = 30;
    const AttackResult r = run_wave_attack(c, w);
    CHECK(r.trajectory == prfm_rounds(th, 30));
    CHECK(r.protocol_violations == 0);
  }
}

TEST_CASE("simulated PRAC wave follows the recurrence") {
  MitigationConfig c;
  c.mechanism = Mechanism::PRAC;
  c.nrh = 1000;
  for (std::uint32_t aboth : {1u, 3u}) {
    for (int n : {1, 2, 4}) {
      c.aboth = aboth;
      c.nbo_r = n;
      WaveSpec w;
      w.r1 = 24;
      const AttackResult r = run_wave_attack(c, w);
      CHECK(r.trajectory == prac_rounds(aboth, n, n, 24, make_timing(true)));
      CHECK(r.max_window_acts <= a_normal(make_timing(true)));
    }
  }
}

TEST_CASE("wave attack reports a violation below the secure N_RH") {
  MitigationConfig c;
  c.mechanism = Mechanism::PRFM;
  c.nrh = 6;
  c.rfm_th = 4;
  WaveSpec w;
  w.r1 = 16;
  const AttackResult r = run_wave_attack(c, w);
  CHECK(r.violations > 0);
  CHECK(r.max_exposure >= 6);
}

TEST_CASE("overwhelming Chronus") {
  MitigationConfig c;
  c.mechanism = Mechanism::Chronus;
  c.nrh = 20;
  c.chronus_nbo = 16;
  c.att_capacity = 4;
  const OverwhelmResult ok = run_overwhelm(c);
  CHECK(ok.hot_rows_forced == 4);
  CHECK(ok.focus_count == chronus_bound(16, 47000, 180000));
  CHECK(ok.attack.violations == 0);
  c.att_capacity = 3;
  const OverwhelmResult bad = run_overwhelm(c);
  CHECK(bad.focus_count > 19);
  CHECK(bad.attack.violations > 0);
  c.mechanism = Mechanism::PRAC;
  CHECK_THROWS_AS(run_overwhelm(c), ConfigError);
}

TEST_CASE("random schedules stay within the bandwidth bound") {
  MitigationConfig c;
  c.mechanism = Mechanism::Chronus;
  c.nrh = 20;
  c.chronus_nbo = 16;
  c.nbo_r = 1;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RandomScheduleSpec s;
    s.seed = seed;
    const ScheduleMeasure m = run_random_schedule(c, s, 16, 1);
    CHECK(m.chain.passes);
    CHECK(m.chain.measured <= m.chain.bound);
  }
}

TEST_CASE("random traffic against a secure PRAC is clean") {
  const ResolvedMitigation r = resolve_mitigation([] {
    MitigationConfig c;
    c.mechanism = Mechanism::PRAC;
    c.nrh = 64;
    return c;
  }());
  RandomTrafficSpec s;
  s.activations = 50000;
  const AttackResult a = run_random_traffic(r.config, s);
  CHECK(a.activations >= 50000);
  CHECK(a.violations == 0);
  CHECK(a.protocol_violations == 0);
}
