#include "rdlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "rdlab/analytic.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/storage.hpp"

namespace rdlab {

namespace {

std::uint32_t half_of(std::uint32_t nrh) { return std::max<std::uint32_t>(1, nrh / 2); }

std::uint64_t entries_for(std::uint32_t threshold, const TimingParams& t) {
  const std::uint64_t w = act_budget_per_window(t);
  return (w + threshold - 1) / threshold;
}

}  // namespace

ResolvedMitigation resolve_mitigation(const MitigationConfig& requested) {
  requested.validate();
  ResolvedMitigation out;
  MitigationConfig& c = out.config;
  c = requested;
  const Mechanism m = c.mechanism;
  const TimingParams t = make_timing(uses_prac_timing(m));

  switch (m) {
    case Mechanism::None:
      return out;
    case Mechanism::PRFM:
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
    case Mechanism::ChronusPB:
    case Mechanism::Chronus: {
      const bool derive = (m == Mechanism::PRFM && c.rfm_th == 0) ||
                          (m == Mechanism::Chronus && c.chronus_nbo == 0) ||
                          (m != Mechanism::PRFM && m != Mechanism::Chronus && c.aboth == 0);
      if (derive) {
        WaveOptions opts;
        opts.inflight_increment = c.inflight_increment;
        const int n = c.nbo_r;
        auto sc = find_secure_config(m, c.nrh, n, opts);
        if (sc) {
          c.rfm_th = m == Mechanism::PRAC_PRFM && c.rfm_th != 0 ? c.rfm_th : sc->config.rfm_th;
          c.aboth = sc->config.aboth;
          c.chronus_nbo = sc->config.chronus_nbo;
          if (m == Mechanism::Chronus) {
            c.nbo_r = sc->config.nbo_r;
            c.nbo_a = sc->config.nbo_a;
          } else if (m != Mechanism::PRFM) {
            c.nbo_r = sc->config.nbo_r;
            c.nbo_a = c.nbo_a < 0 ? sc->config.nbo_a : c.nbo_a;
          }
        } else {
          // Nothing is secure here; run the most aggressive setting and say so.
          if (m == Mechanism::PRFM || (m == Mechanism::PRAC_PRFM && c.rfm_th == 0)) c.rfm_th = 1;
          if (m == Mechanism::Chronus) {
            c.chronus_nbo = 1;
            c.nbo_r = 1;
            c.nbo_a = 0;
          } else if (m != Mechanism::PRFM) {
            c.aboth = 1;
          }
        }
      }
      if (m == Mechanism::PRAC_PRFM && c.rfm_th == 0) c.rfm_th = 75;
      if (m == Mechanism::Chronus) {
        c.nbo_r = 1;
        if (c.nbo_a < 0) c.nbo_a = 0;
        if (c.chronus_nbo > 256) throw ConfigError("Chronus N_BO must be <= 256 (8-bit counters)");
      }
      WaveOptions opts;
      opts.inflight_increment = c.inflight_increment;
      const Hammer h = worst_case(c, opts);
      out.worst = h.max_hammer;
      out.worst_r1 = h.r1;
      out.claimed_secure = out.worst < c.nrh;
      if (m == Mechanism::Chronus && (c.att_capacity < att_min_size(t.tRC, t.tABOact) ||
                                      c.chronus_nbo + a_normal(t) > 256)) {
        out.claimed_secure = false;
      }
      return out;
    }
    case Mechanism::Graphene: {
      if (c.graphene_threshold == 0) c.graphene_threshold = half_of(c.nrh);
      if (c.graphene_entries == 0) c.graphene_entries = entries_for(c.graphene_threshold, t);
      out.claimed_secure = c.graphene_threshold <= half_of(c.nrh) &&
                           c.graphene_entries >= entries_for(c.graphene_threshold, t);
      return out;
    }
    case Mechanism::ABACuS: {
      if (c.abacus_threshold == 0) c.abacus_threshold = half_of(c.nrh);
      if (c.abacus_entries == 0) c.abacus_entries = entries_for(c.abacus_threshold, t);
      out.claimed_secure = c.abacus_threshold <= half_of(c.nrh) &&
                           c.abacus_entries >= entries_for(c.abacus_threshold, t);
      return out;
    }
    case Mechanism::Hydra: {
      if (c.hydra_row_threshold == 0) c.hydra_row_threshold = half_of(c.nrh);
      if (c.hydra_group_threshold == 0) {
        c.hydra_group_threshold = std::max<std::uint32_t>(1, c.hydra_row_threshold * 4 / 5);
      }
      out.claimed_secure = c.hydra_row_threshold <= half_of(c.nrh) &&
                           c.hydra_group_threshold <= c.hydra_row_threshold;
      return out;
    }
    case Mechanism::PARA: {
      const double needed = para_probability_for(c.nrh);
      if (c.para_probability == 0.0) c.para_probability = needed;
      out.claimed_secure = c.para_probability >= needed;
      return out;
    }
  }
  return out;
}

void WorkloadSpec::validate() const {
  if (trace_files.empty()) {
    if (mixes < 1) throw ConfigError("workload.mixes must be >= 1");
    if (pattern.empty()) throw ConfigError("workload.pattern must name at least one core");
    for (char ch : pattern) {
      if (ch != 'H' && ch != 'M' && ch != 'L') {
        throw ConfigError("workload.pattern may only contain H, M and L");
      }
    }
  }
}

std::vector<Workload> build_workloads(const WorkloadSpec& spec, const SystemConfig& system) {
  spec.validate();
  const std::uint64_t capacity = system.geometry.capacity_bytes();
  const std::size_t length =
      spec.trace_length > 0
          ? spec.trace_length
          : static_cast<std::size_t>(std::max<std::uint64_t>(4096, system.instructions / 8));
  std::vector<Workload> out;
  if (!spec.trace_files.empty()) {
    Workload w;
    w.name = "traces";
    for (const auto& path : spec.trace_files) w.traces.push_back(load_trace(path));
    out.push_back(std::move(w));
  } else {
    for (const WorkloadMix& mix : workload_mixes(spec.pattern, spec.mixes)) {
      out.push_back(Workload{mix.name, build_mix(mix, length, capacity)});
    }
  }
  if (spec.perf_attack) {
    const AddressMapper mapper(system.scheduler.mapping, system.geometry);
    for (Workload& w : out) {
      if (w.traces.empty()) continue;
      w.traces.back() = gen_perf_attack(mapper);
      w.name += "+attack";
    }
  }
  return out;
}

nlohmann::json RunOutcome::to_json() const {
  nlohmann::json j;
  j["workload"] = workload;
  j["mitigation"] = mitigation.config.to_json();
  j["claimed_secure"] = mitigation.claimed_secure;
  j["analytic_worst"] = mitigation.worst;
  j["weighted_speedup"] = weighted_speedup;
  j["max_slowdown"] = max_slowdown;
  j["alone_ipc"] = alone_ipc;
  j["system"] = shared.to_json();
  return j;
}

namespace {

std::mutex alone_mu;
std::map<std::string, double> alone_cache;

std::string alone_key(const SystemConfig& s, const Trace& t) {
  std::string k = t.name;
  k += '|' + std::to_string(t.entries.size()) + '|' + std::to_string(s.instructions) + '|' +
       std::to_string(s.cache.enabled) + '|' + std::string(to_string(s.scheduler.mapping)) + '|' +
       std::to_string(s.seed) + '|' + std::to_string(s.geometry.ranks);
  for (const auto& [key, ns] : s.timing_overrides) k += '|' + key + '=' + std::to_string(ns);
  return k;
}

double alone_ipc(const SystemConfig& system, const Trace& trace) {
  const std::string key = alone_key(system, trace);
  {
    std::lock_guard<std::mutex> lock(alone_mu);
    auto it = alone_cache.find(key);
    if (it != alone_cache.end()) return it->second;
  }
  SystemConfig cfg = system;
  cfg.mitigation = MitigationConfig{};
  cfg.mitigation.nrh = system.mitigation.nrh;
  cfg.timing = apply_overrides(make_timing(false), system.timing_overrides);
  cfg.keep_log = false;
  const SystemResult r = run_system(cfg, {trace});
  const double ipc = r.cores.at(0).ipc;
  std::lock_guard<std::mutex> lock(alone_mu);
  alone_cache.emplace(key, ipc);
  return ipc;
}

}  // namespace

RunOutcome run_workload(const SystemConfig& system, const Workload& workload) {
  RunOutcome out;
  out.workload = workload.name;
  out.mitigation = resolve_mitigation(system.mitigation);
  SystemConfig cfg = system;
  cfg.mitigation = out.mitigation.config;
  cfg.timing = apply_overrides(make_timing(uses_prac_timing(cfg.mitigation.mechanism)),
                               system.timing_overrides);
  out.shared = run_system(cfg, workload.traces);
  for (const Trace& t : workload.traces) out.alone_ipc.push_back(alone_ipc(system, t));
  const std::vector<double> shared = out.shared.ipcs();
  out.weighted_speedup = weighted_speedup(shared, out.alone_ipc);
  out.max_slowdown = max_slowdown(shared, out.alone_ipc);
  return out;
}

const std::vector<std::uint32_t>& default_nrh_grid() {
  static const std::vector<std::uint32_t> grid = {1000, 512, 256, 128, 64, 32, 20};
  return grid;
}

std::vector<const SweepCellResult*> SweepResult::failed() const {
  std::vector<const SweepCellResult*> out;
  for (const auto& c : cells) {
    if (!c.outcome) out.push_back(&c);
  }
  return out;
}

const SweepCellResult* SweepResult::find(Mechanism m, std::uint32_t nrh,
                                         const std::string& workload) const {
  for (const auto& c : cells) {
    if (c.cell.mechanism == m && c.cell.workload == workload &&
        (m == Mechanism::None || c.cell.nrh == nrh)) {
      return &c;
    }
  }
  return nullptr;
}

std::optional<double> SweepResult::mean_normalized_ws(Mechanism m, std::uint32_t nrh) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : cells) {
    if (c.cell.mechanism != m || c.cell.nrh != nrh || !c.outcome) continue;
    sum += c.normalized_ws;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

SweepResult run_sweep(const SystemConfig& base, const std::vector<Mechanism>& mechanisms,
                      const std::vector<std::uint32_t>& nrhs, const WorkloadSpec& workloads,
                      int threads) {
  if (nrhs.empty()) throw ConfigError("sweep needs at least one N_RH value");
  const std::vector<Workload> loads = build_workloads(workloads, base);
  SweepResult result;
  for (const Workload& w : loads) {
    result.cells.push_back({SweepCell{Mechanism::None, nrhs.front(), w.name}, {}, 0.0, {}});
    for (Mechanism m : mechanisms) {
      if (m == Mechanism::None) continue;
      for (std::uint32_t nrh : nrhs) result.cells.push_back({SweepCell{m, nrh, w.name}, {}, 0.0, {}});
    }
  }
  std::map<std::string, const Workload*> by_name;
  for (const Workload& w : loads) by_name[w.name] = &w;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      SweepCellResult& cell = result.cells[i];
      try {
        SystemConfig cfg = base;
        cfg.mitigation.mechanism = cell.cell.mechanism;
        cfg.mitigation.nrh = cell.cell.nrh;
        cell.outcome = run_workload(cfg, *by_name.at(cell.cell.workload));
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(result.cells.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (SweepCellResult& c : result.cells) {
    if (!c.outcome) continue;
    const SweepCellResult* base_cell = result.find(Mechanism::None, 0, c.cell.workload);
    if (base_cell && base_cell->outcome && base_cell->outcome->weighted_speedup > 0.0) {
      c.normalized_ws = c.outcome->weighted_speedup / base_cell->outcome->weighted_speedup;
    }
  }
  return result;
}

}  // namespace rdlab
