#include "rdlab/attacks.hpp"

#include <algorithm>
#include <random>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

void fill(AttackResult& r, const AttackBench& bench, Ps start) {
  const DramChannel& ch = bench.channel();
  r.max_exposure = ch.oracle().max_exposure();
  r.violations = ch.oracle().violation_count();
  r.activations = ch.oracle().activations();
  r.backoffs = bench.maintenance().backoffs();
  r.rfms = ch.counts().by_kind[static_cast<int>(CommandKind::RFMab)];
  r.protocol_violations = bench.maintenance().protocol_violations();
  r.max_window_acts = bench.maintenance().max_window_acts_per_bank();
  r.elapsed = bench.now() - start;
  for (int rank = 0; rank < ch.geometry().ranks; ++rank) r.rfm_busy += ch.rfm_busy(rank);
}

std::vector<std::int64_t> aggressor_rows(std::int64_t first, std::int64_t spacing, std::int64_t n,
                                         std::int64_t rows_per_bank) {
  if (n < 1) throw ConfigError("attack needs at least one row");
  std::vector<std::int64_t> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) rows.push_back(first + i * spacing);
  if (rows.back() + spacing >= rows_per_bank)
    throw ConfigError("attack rows do not fit in the bank");
  return rows;
}

// Runs maintenance until no back-off is in progress on any rank.
void settle(AttackBench& bench) {
  const DramChannel& ch = bench.channel();
  for (int guard = 0; guard < 100000; ++guard) {
    bool busy = false;
    for (int r = 0; r < ch.geometry().ranks; ++r) {
      busy = busy || ch.device().backoff(r).asserted() ||
             bench.maintenance().backoff(r) != MaintenanceUnit::Backoff::Idle;
    }
    if (!busy) return;
    bench.idle_until(bench.now() + ch.timing().tRFM);
  }
  throw ProtocolError("back-off never completed");
}

}  // namespace

std::uint32_t prehammer_level(const MitigationConfig& cfg) {
  switch (cfg.mechanism) {
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
    case Mechanism::ChronusPB:
      return cfg.aboth > 0 ? cfg.aboth - 1 : 0;
    case Mechanism::Chronus:
      return cfg.chronus_nbo > 0 ? cfg.chronus_nbo - 1 : 0;
    default:
      return 0;
  }
}

nlohmann::json AttackResult::to_json() const {
  return {{"trajectory", trajectory},
          {"max_exposure", max_exposure},
          {"violations", violations},
          {"activations", activations},
          {"backoffs", backoffs},
          {"rfms", rfms},
          {"protocol_violations", protocol_violations},
          {"max_window_acts_per_bank", max_window_acts},
          {"elapsed_ns", to_ns(elapsed)},
          {"rfm_busy_ns", to_ns(rfm_busy)}};
}

AttackResult run_wave_attack(const MitigationConfig& cfg, const WaveSpec& spec) {
  BenchConfig bc;
  bc.mitigation = cfg;
  bc.refresh.enabled = spec.periodic_refresh;
  if (spec.rows_per_bank > 0) bc.geometry.rows_per_bank = spec.rows_per_bank;
  AttackBench bench(bc);
  const bool warm = spec.warmup && uses_device_backoff(cfg.mechanism);
  // Decoys take the lowest rows so ties in the RFM pick go their way.
  const std::int64_t decoys = warm ? std::max(cfg.nbo_r, 1) : 0;
  const auto all = aggressor_rows(spec.first_row, spec.spacing, spec.r1 + decoys,
                                  bc.geometry.rows_per_bank);
  const std::vector<std::int64_t> decoy_rows(all.begin(), all.begin() + decoys);
  const std::vector<std::int64_t> rows(all.begin() + decoys, all.end());
  const Ps start = bench.now();
  const Ps budget = bench.channel().timing().tREFW;
  const SafetyOracle& oracle = bench.channel().oracle();
  auto stop = [&] { return spec.stop_on_violation && !oracle.clean(); };

  std::vector<std::uint32_t> expected(rows.size(), 0);
  const std::uint32_t pre = spec.prehammer ? prehammer_level(cfg) : 0;
  for (std::size_t i = 0; i < rows.size() && !stop(); ++i) {
    for (std::uint32_t k = 0; k < pre; ++k) bench.hammer(spec.bank, rows[i], spec.read);
    expected[i] = pre;
  }
  if (warm) {
    for (std::int64_t d : decoy_rows) {
      for (std::uint32_t k = 0; k < pre; ++k) bench.hammer(spec.bank, d, spec.read);
    }
    for (std::size_t i = 0; bench.maintenance().backoffs() == 0 && !stop(); ++i) {
      bench.hammer(spec.bank, decoy_rows[i % decoy_rows.size()], spec.read);
    }
    if (!stop()) settle(bench);
  }

  AttackResult res;
  std::vector<bool> alive(rows.size(), true);
  std::vector<std::size_t> set;
  for (int round = 0; round < spec.max_rounds && !stop(); ++round) {
    bench.ready_to_activate(spec.bank);
    if (spec.within_refresh_window && bench.now() - start >= budget) break;
    set.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (alive[i] && bench.exposure(spec.bank, rows[i]) != expected[i]) alive[i] = false;
      if (alive[i]) set.push_back(i);
    }
    res.trajectory.push_back(static_cast<std::int64_t>(set.size()));
    if (set.empty()) break;
    for (std::size_t i : set) {
      bench.hammer(spec.bank, rows[i], spec.read);
      ++expected[i];
      if (stop()) break;
    }
  }
  if (!stop()) settle(bench);
  fill(res, bench, start);
  return res;
}

OverwhelmResult run_overwhelm(const MitigationConfig& cfg, const OverwhelmSpec& spec) {
  if (cfg.mechanism != Mechanism::Chronus) throw ConfigError("overwhelm pattern targets Chronus");
  BenchConfig bc;
  bc.mitigation = cfg;
  AttackBench bench(bc);
  const TimingParams& t = bench.channel().timing();
  const int a = a_normal(t);
  const std::uint32_t nbo = cfg.chronus_nbo;
  auto rows = aggressor_rows(spec.first_row, spec.spacing, a + 2, bc.geometry.rows_per_bank);
  const std::int64_t fresh = rows.back();
  rows.pop_back();
  const int bank = spec.bank;

  OverwhelmResult out;
  for (std::int64_t r : rows) {
    for (std::uint32_t k = 0; k + 1 < nbo; ++k) bench.hammer(bank, r);
  }
  // Trigger with the first row, then bring the rest to threshold inside the window.
  for (std::int64_t r : rows) bench.hammer(bank, r);
  for (std::int64_t r : rows) {
    if (bench.channel().device().activation_count(bank, r) >= nbo) ++out.hot_rows_forced;
  }
  const std::uint64_t before = bench.maintenance().backoff_rfms();
  settle(bench);
  out.rfms_first_backoff = static_cast<int>(bench.maintenance().backoff_rfms() - before);

  // Focus on a row the device failed to refresh, or a fresh one.
  std::int64_t focus = -1;
  std::uint32_t expected = 0;
  for (std::int64_t r : rows) {
    const std::uint32_t e = bench.exposure(bank, r);
    if (e >= nbo && e > expected) {
      focus = r;
      expected = e;
    }
  }
  if (focus < 0) {
    focus = fresh;
    for (std::uint32_t k = 0; k + 1 < nbo; ++k) bench.hammer(bank, focus);
    expected = nbo - 1;
  }
  for (std::uint32_t k = 0; k < 2 * cfg.nrh + 4; ++k) {
    bench.hammer(bank, focus);
    ++expected;
    const std::uint32_t e = bench.exposure(bank, focus);
    out.focus_count = std::max(out.focus_count, e);
    if (e != expected) break;
  }
  settle(bench);
  fill(out.attack, bench, 0);
  return out;
}

namespace {

ScheduleMeasure measure(AttackBench& bench, std::uint32_t aboth, int nbo_r) {
  settle(bench);
  const DramChannel& ch = bench.channel();
  ScheduleMeasure m;
  m.window = std::max(bench.now(), ch.timing_state().rank_busy_until(0));
  m.rfm_time = ch.rfm_busy(0);
  m.chain = dbc_chain(m.rfm_time, std::max<Ps>(m.window, 1), aboth, nbo_r, ch.timing().tRFM,
                      ch.timing().tRC);
  return m;
}

}  // namespace

ScheduleMeasure run_random_schedule(const MitigationConfig& cfg, const RandomScheduleSpec& spec,
                                    std::uint32_t aboth, int nbo_r) {
  BenchConfig bc;
  bc.mitigation = cfg;
  bc.seed = spec.seed;
  if (spec.banks < 1 || spec.banks > bc.geometry.banks_per_rank())
    throw ConfigError("random schedule banks must fit in one rank");
  AttackBench bench(bc);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> bank(0, spec.banks - 1);
  std::uniform_int_distribution<int> row(0, spec.rows - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<Ps> idle(0, spec.max_idle);
  for (std::size_t i = 0; i < spec.hammers; ++i) {
    if (u(rng) < spec.idle_probability) bench.idle_until(bench.now() + idle(rng));
    bench.hammer(bank(rng), 16 + 5 * row(rng));
  }
  return measure(bench, aboth, nbo_r);
}

ScheduleMeasure run_dbc_worst_pattern(const MitigationConfig& cfg, std::uint32_t aboth, int nbo_r,
                                      int backoffs) {
  BenchConfig bc;
  bc.mitigation = cfg;
  AttackBench bench(bc);
  const std::int64_t row = 16;
  while (bench.maintenance().backoffs() < static_cast<std::uint64_t>(backoffs)) {
    bench.hammer(0, row);
  }
  return measure(bench, aboth, nbo_r);
}

AttackResult run_random_traffic(const MitigationConfig& cfg, const RandomTrafficSpec& spec) {
  BenchConfig bc;
  bc.mitigation = cfg;
  bc.refresh.enabled = spec.periodic_refresh;
  bc.seed = spec.seed;
  AttackBench bench(bc);
  const std::int64_t rows = bc.geometry.rows_per_bank;
  std::mt19937_64 rng(spec.seed ^ 0xA5A5A5A5ull);
  std::uniform_int_distribution<int> bank(0, spec.banks - 1);
  std::uniform_int_distribution<std::int64_t> any_row(0, rows - 1);
  std::uniform_int_distribution<int> hot(0, spec.hot_rows - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Hot rows sit close together so that their victims overlap.
  std::vector<std::int64_t> base(static_cast<std::size_t>(spec.banks));
  for (auto& b : base) b = any_row(rng) % (rows - 4 * spec.hot_rows - 8) + 4;

  for (std::uint64_t i = 0; i < spec.activations; ++i) {
    const int b = bank(rng);
    const std::int64_t r = u(rng) < spec.hot_fraction ? base[b] + 2 * hot(rng) : any_row(rng);
    bench.hammer(b, r);
  }
  settle(bench);
  AttackResult res;
  fill(res, bench, 0);
  return res;
}

}  // namespace rdlab
