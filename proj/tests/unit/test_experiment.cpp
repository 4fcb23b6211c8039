#include <doctest.h>

#include "rdlab/analytic.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/experiment.hpp"

using namespace rdlab;

namespace {

MitigationConfig ask(Mechanism m, std::uint32_t nrh) {
  MitigationConfig c;
  c.mechanism = m;
  c.nrh = nrh;
  return c;
}

}  // namespace

TEST_CASE("resolved PRAC and PRFM settings are secure") {
  for (std::uint32_t nrh : {1000u, 64u, 20u}) {
    const ResolvedMitigation prac = resolve_mitigation(ask(Mechanism::PRAC, nrh));
    CHECK(prac.claimed_secure);
    CHECK(prac.worst < nrh);
    CHECK(prac.config.aboth >= 1);
    const ResolvedMitigation prfm = resolve_mitigation(ask(Mechanism::PRFM, nrh));
    CHECK(prfm.claimed_secure);
    CHECK(prfm.worst < nrh);
  }
  const ResolvedMitigation p19 = resolve_mitigation(ask(Mechanism::PRAC, 19));
  CHECK_FALSE(p19.claimed_secure);
  CHECK(p19.worst == 19);
}

TEST_CASE("resolved Chronus") {
  const ResolvedMitigation c = resolve_mitigation(ask(Mechanism::Chronus, 20));
  CHECK(c.claimed_secure);
  CHECK(chronus_bound(c.config.chronus_nbo, 47000, 180000) < 20);
  CHECK(resolve_mitigation(ask(Mechanism::Chronus, 1000)).config.chronus_nbo == 253);
  MitigationConfig small = ask(Mechanism::Chronus, 20);
  small.att_capacity = 3;
  const ResolvedMitigation s = resolve_mitigation(small);
  CHECK(s.config.att_capacity == 3);
  CHECK_FALSE(s.claimed_secure);
}

TEST_CASE("explicit values are judged as given") {
  MitigationConfig c = ask(Mechanism::PRFM, 32);
  c.rfm_th = 4;
  CHECK_FALSE(resolve_mitigation(c).claimed_secure);
  c.rfm_th = 3;
  CHECK(resolve_mitigation(c).claimed_secure);
}

TEST_CASE("controller-side mechanisms get thresholds below N_RH") {
  const auto g = resolve_mitigation(ask(Mechanism::Graphene, 64));
  CHECK(g.config.graphene_threshold == 32);
  CHECK(g.config.graphene_entries > 0);
  const auto h = resolve_mitigation(ask(Mechanism::Hydra, 64));
  CHECK(h.config.hydra_row_threshold == 32);
  CHECK(h.config.hydra_group_threshold < h.config.hydra_row_threshold);
  const auto p = resolve_mitigation(ask(Mechanism::PARA, 64));
  CHECK(p.config.para_probability > 0.0);
  CHECK(p.config.para_probability < 1.0);
}

TEST_CASE("workload spec validation") {
  WorkloadSpec w;
  CHECK_NOTHROW(w.validate());
  w.mixes = 0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("small system run is deterministic and clean") {
  SystemConfig sys;
  sys.instructions = 20000;
  sys.mitigation = ask(Mechanism::Chronus, 64);
  WorkloadSpec w;
  w.pattern = "HHMM";
  const auto loads = build_workloads(w, sys);
  REQUIRE(loads.size() == 1);
  const RunOutcome a = run_workload(sys, loads[0]);
  const RunOutcome b = run_workload(sys, loads[0]);
  CHECK(a.weighted_speedup == b.weighted_speedup);
  CHECK(a.weighted_speedup > 0.0);
  CHECK(a.weighted_speedup <= 4.0 + 1e-9);
  CHECK(a.shared.violations == 0);
  CHECK(a.shared.protocol_violations == 0);
  CHECK(a.to_json().contains("weighted_speedup"));
}
