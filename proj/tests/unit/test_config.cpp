#include <doctest.h>

#include <algorithm>

#include "rdlab/config.hpp"
#include "rdlab/errors.hpp"

using namespace rdlab;

namespace {

std::string value_of(const RunConfig& c, const std::string& key) {
  for (const auto& [k, v] : c.effective()) {
    if (k == key) return v;
  }
  return "<missing>";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = default_run_config();
  CHECK(c.system.instructions == 1'000'000);
  CHECK(c.workload.pattern == "HHHH");
  CHECK(c.sweep.nrh == default_nrh_grid());
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective().size() == config_keys().size());
}

TEST_CASE("yaml, then flags, with provenance") {
  RunConfig c = default_run_config();
  apply_yaml(c,
             "seed: 9\n"
             "mitigation:\n"
             "  mechanism: chronus\n"
             "  nrh: 64\n"
             "scheduler:\n"
             "  cap: 2\n",
             "inline");
  apply_override(c, "mitigation.nrh=32");
  CHECK(c.system.seed == 9);
  CHECK(c.system.mitigation.mechanism == Mechanism::Chronus);
  CHECK(c.system.mitigation.nrh == 32);
  CHECK(c.system.scheduler.cap == 2);
  CHECK(c.provenance.at("seed") == Source::File);
  CHECK(c.provenance.at("mitigation.nrh") == Source::Flag);
  CHECK(value_of(c, "mitigation.nrh") == "32");
  const std::string text = c.explain();
  CHECK(text.find("mitigation.nrh") != std::string::npos);
  CHECK(text.find("flag") != std::string::npos);
  CHECK(text.find("file") != std::string::npos);
  CHECK(text.find("default") != std::string::npos);
}

TEST_CASE("unknown keys and bad values are errors") {
  RunConfig c = default_run_config();
  CHECK_THROWS_AS(apply_yaml(c, "mitigation:\n  nhr: 5\n", "inline"), ConfigError);
  CHECK_THROWS_AS(apply_yaml(c, "bogus: 1\n", "inline"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "seed"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "seed=abc"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "mitigation.mechanism=nope"), ConfigError);
  CHECK_THROWS(apply_yaml(c, "seed: [1, 2\n", "inline"));
  CHECK_THROWS_AS(load_config_file(c, "/nonexistent/rdlab.yaml"), ConfigError);
}

TEST_CASE("range checks run at validation") {
  RunConfig c = default_run_config();
  apply_override(c, "scheduler.cap=0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_run_config();
  apply_override(c, "timing.tRC=-5");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_run_config();
  apply_override(c, "sweep.nrh=0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("timing overrides reach the system config") {
  RunConfig c = default_run_config();
  apply_override(c, "timing.tRFM=280");
  REQUIRE(c.system.timing_overrides.size() == 1);
  CHECK(c.system.timing_overrides[0].first == "tRFM");
  CHECK(c.system.timing_overrides[0].second == doctest::Approx(280.0));
  CHECK(value_of(c, "timing.tRFM") == "280");
}

TEST_CASE("list keys") {
  RunConfig c = default_run_config();
  apply_override(c, "sweep.nrh=64,20");
  apply_override(c, "sweep.mechanisms=prac,graphene");
  CHECK(c.sweep.nrh == std::vector<std::uint32_t>{64, 20});
  CHECK(c.sweep.mechanisms == std::vector<Mechanism>{Mechanism::PRAC, Mechanism::Graphene});
}

TEST_CASE("hash depends on values only") {
  RunConfig a = default_run_config();
  RunConfig b = default_run_config();
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  apply_override(b, "seed=0");
  CHECK(a.hash() == b.hash());
  apply_override(b, "seed=1");
  CHECK(a.hash() != b.hash());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
