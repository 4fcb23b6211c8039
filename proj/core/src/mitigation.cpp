#include "rdlab/mitigation.hpp"

#include <algorithm>
#include <cmath>

#include "rdlab/errors.hpp"

namespace rdlab {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::None: return "none";
    case Mechanism::PRFM: return "prfm";
    case Mechanism::PRAC: return "prac";
    case Mechanism::PRAC_PRFM: return "prac+prfm";
    case Mechanism::Chronus: return "chronus";
    case Mechanism::ChronusPB: return "chronus-pb";
    case Mechanism::Graphene: return "graphene";
    case Mechanism::Hydra: return "hydra";
    case Mechanism::PARA: return "para";
    case Mechanism::ABACuS: return "abacus";
  }
  return "?";
}

const std::vector<Mechanism>& all_mechanisms() {
  static const std::vector<Mechanism> all = {
      Mechanism::None,     Mechanism::PRFM,      Mechanism::PRAC,     Mechanism::PRAC_PRFM,
      Mechanism::Chronus,  Mechanism::ChronusPB, Mechanism::Graphene, Mechanism::Hydra,
      Mechanism::PARA,     Mechanism::ABACuS};
  return all;
}

Mechanism parse_mechanism(std::string_view name) {
  for (Mechanism m : all_mechanisms()) {
    if (to_string(m) == name) return m;
  }
  if (name == "baseline") return Mechanism::None;
  throw ConfigError("unknown mitigation '" + std::string(name) + "'");
}

bool uses_prac_timing(Mechanism m) { return m == Mechanism::PRAC || m == Mechanism::PRAC_PRFM; }

bool uses_prfm(Mechanism m) { return m == Mechanism::PRFM || m == Mechanism::PRAC_PRFM; }

bool uses_device_backoff(Mechanism m) {
  return m == Mechanism::PRAC || m == Mechanism::PRAC_PRFM || m == Mechanism::Chronus ||
         m == Mechanism::ChronusPB;
}

bool uses_chronus_counters(Mechanism m) {
  return m == Mechanism::Chronus || m == Mechanism::ChronusPB;
}

void MitigationConfig::validate() const {
  if (nrh < 1) throw ConfigError("N_RH must be >= 1");
  if (nbo_r < 1) throw ConfigError("N_BO_R must be >= 1");
  if (nbo_a < -1) throw ConfigError("N_BO_A must be >= 0 (or -1 to follow N_BO_R)");
  if (att_capacity < 1) throw ConfigError("ATT capacity must be >= 1");
  if (para_probability < 0.0 || para_probability > 1.0) {
    throw ConfigError("PARA probability must lie in [0, 1]");
  }
  if (hydra_groups_per_rank < 1 || hydra_rcc_entries < 1) {
    throw ConfigError("Hydra sizing must be >= 1");
  }
}

nlohmann::json MitigationConfig::to_json() const {
  return {{"mechanism", to_string(mechanism)},
          {"nrh", nrh},
          {"aboth", aboth},
          {"nbo_r", nbo_r},
          {"nbo_a", effective_nbo_a()},
          {"rfm_th", rfm_th},
          {"chronus_nbo", chronus_nbo},
          {"para_probability", para_probability},
          {"graphene_threshold", graphene_threshold},
          {"graphene_entries", graphene_entries},
          {"hydra_row_threshold", hydra_row_threshold},
          {"hydra_group_threshold", hydra_group_threshold},
          {"hydra_groups_per_rank", hydra_groups_per_rank},
          {"hydra_rcc_entries", hydra_rcc_entries},
          {"abacus_threshold", abacus_threshold},
          {"abacus_entries", abacus_entries},
          {"att_capacity", att_capacity},
          {"borrowed_refresh", borrowed_refresh},
          {"inflight_increment", inflight_increment}};
}

DeviceConfig device_config_for(const MitigationConfig& cfg) {
  DeviceConfig d;
  d.att_capacity = cfg.att_capacity;
  d.borrowed_refresh = cfg.borrowed_refresh;
  d.nbo_r = cfg.nbo_r;
  d.nbo_a = cfg.effective_nbo_a();
  switch (cfg.mechanism) {
    case Mechanism::PRFM:
      d.counters = CounterMode::PracOnPrecharge;
      d.policy = BackoffPolicy::None;
      d.borrowed_refresh = false;
      break;
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
      d.counters = CounterMode::PracOnPrecharge;
      d.policy = BackoffPolicy::Prac;
      d.threshold = cfg.aboth;
      break;
    case Mechanism::Chronus:
      d.counters = CounterMode::ChronusCcu;
      d.policy = BackoffPolicy::Chronus;
      d.threshold = cfg.chronus_nbo;
      break;
    case Mechanism::ChronusPB:
      d.counters = CounterMode::ChronusCcu;
      d.policy = BackoffPolicy::Prac;
      d.threshold = cfg.aboth;
      break;
    default:
      d.counters = CounterMode::Off;
      d.policy = BackoffPolicy::None;
      d.borrowed_refresh = false;
      break;
  }
  return d;
}

std::uint64_t act_budget_per_window(const TimingParams& timing) {
  return static_cast<std::uint64_t>(timing.tREFW / timing.tRC);
}

double para_probability_for(std::uint32_t nrh) {
  return 1.0 - std::pow(1e-15, 1.0 / static_cast<double>(nrh));
}

ParaMitigation::ParaMitigation(double probability, std::uint64_t seed)
    : p_(probability), rng_(seed), coin_(probability) {}

void ParaMitigation::observe_activation(int flat_bank, std::int64_t row, Ps,
                                        std::vector<PreventiveAction>& out) {
  if (coin_(rng_)) {
    ++triggers_;
    out.push_back({PreventiveAction::Kind::RefreshVictims, flat_bank, row});
  }
}

nlohmann::json ParaMitigation::stats() const {
  return {{"probability", p_}, {"triggers", triggers_}};
}

GrapheneMitigation::GrapheneMitigation(int banks, std::uint64_t entries, std::uint32_t threshold,
                                       Ps reset_period)
    : entries_(entries),
      threshold_(threshold),
      reset_period_(reset_period),
      next_reset_(reset_period),
      tables_(static_cast<std::size_t>(banks)) {
  if (threshold < 1 || entries < 1) throw ConfigError("Graphene sizing must be >= 1");
}

void GrapheneMitigation::observe_activation(int flat_bank, std::int64_t row, Ps t,
                                            std::vector<PreventiveAction>& out) {
  while (t >= next_reset_) {
    for (auto& tab : tables_) {
      if (tab) tab->clear();
    }
    next_reset_ += reset_period_;
  }
  auto& tab = tables_[flat_bank];
  if (!tab) tab = std::make_unique<MisraGriesTable>(entries_);
  const std::uint64_t est = tab->observe(static_cast<std::uint64_t>(row));
  if (est > 0 && est % threshold_ == 0) {
    ++triggers_;
    out.push_back({PreventiveAction::Kind::RefreshVictims, flat_bank, row});
  }
}

nlohmann::json GrapheneMitigation::stats() const {
  return {{"threshold", threshold_}, {"entries", entries_}, {"triggers", triggers_}};
}

HydraMitigation::HydraMitigation(const DeviceGeometry& geometry, std::uint32_t group_threshold,
                                 std::uint32_t row_threshold, int groups_per_rank,
                                 int rcc_entries, Ps reset_period)
    : geometry_(geometry),
      group_threshold_(group_threshold),
      row_threshold_(row_threshold),
      groups_per_rank_(groups_per_rank),
      rcc_entries_(static_cast<std::size_t>(rcc_entries)),
      reset_period_(reset_period),
      next_reset_(reset_period),
      gct_(static_cast<std::size_t>(geometry.ranks),
           std::vector<std::uint32_t>(static_cast<std::size_t>(groups_per_rank), 0)) {
  if (group_threshold < 1 || row_threshold <= group_threshold) {
    throw ConfigError("Hydra needs 1 <= group threshold < row threshold");
  }
  const std::uint64_t rows_per_rank =
      static_cast<std::uint64_t>(geometry.rows_per_bank) * geometry.banks_per_rank();
  rows_per_group_ = std::max<std::uint64_t>(1, rows_per_rank / groups_per_rank);
}

bool HydraMitigation::rcc_access(std::uint64_t id) {
  auto it = rcc_.find(id);
  if (it != rcc_.end()) {
    rcc_lru_.splice(rcc_lru_.begin(), rcc_lru_, it->second);
    return true;
  }
  if (rcc_.size() >= rcc_entries_) {
    rcc_.erase(rcc_lru_.back());
    rcc_lru_.pop_back();
  }
  rcc_lru_.push_front(id);
  rcc_[id] = rcc_lru_.begin();
  return false;
}

void HydraMitigation::observe_activation(int flat_bank, std::int64_t row, Ps t,
                                         std::vector<PreventiveAction>& out) {
  while (t >= next_reset_) {
    for (auto& g : gct_) std::fill(g.begin(), g.end(), 0);
    rct_.clear();
    rcc_.clear();
    rcc_lru_.clear();
    next_reset_ += reset_period_;
  }
  const int per = geometry_.banks_per_rank();
  const int rank = flat_bank / per;
  const std::uint64_t id_in_rank =
      static_cast<std::uint64_t>(flat_bank % per) * static_cast<std::uint64_t>(geometry_.rows_per_bank) +
      static_cast<std::uint64_t>(row);
  const std::uint64_t group = std::min<std::uint64_t>(id_in_rank / rows_per_group_,
                                                      static_cast<std::uint64_t>(groups_per_rank_ - 1));
  std::uint32_t& g = gct_[rank][group];
  if (g < group_threshold_) {
    ++g;
    return;
  }
  const std::uint64_t id = (static_cast<std::uint64_t>(flat_bank) << 40) | static_cast<std::uint64_t>(row);
  if (!rcc_access(id)) {
    ++rcc_misses_;
    out.push_back({PreventiveAction::Kind::ExtraColumnAccess, flat_bank, row});
  }
  auto [it, fresh] = rct_.try_emplace(id, group_threshold_);
  if (++it->second >= row_threshold_) {
    it->second = 0;
    ++triggers_;
    out.push_back({PreventiveAction::Kind::RefreshVictims, flat_bank, row});
  }
}

nlohmann::json HydraMitigation::stats() const {
  return {{"group_threshold", group_threshold_},
          {"row_threshold", row_threshold_},
          {"triggers", triggers_},
          {"rcc_misses", rcc_misses_}};
}

AbacusMitigation::AbacusMitigation(int banks, std::uint64_t entries, std::uint32_t threshold,
                                   Ps reset_period)
    : banks_(banks),
      threshold_(threshold),
      reset_period_(reset_period),
      next_reset_(reset_period),
      table_(entries) {
  if (banks > kMaxBanks) throw ConfigError("ABACuS supports at most 256 banks per channel");
  if (threshold < 1) throw ConfigError("ABACuS threshold must be >= 1");
}

void AbacusMitigation::observe_activation(int flat_bank, std::int64_t row, Ps t,
                                          std::vector<PreventiveAction>& out) {
  while (t >= next_reset_) {
    table_.clear();
    siblings_.clear();
    next_reset_ += reset_period_;
  }
  auto& sav = siblings_[row];
  sav.set(static_cast<std::size_t>(flat_bank));
  const std::uint64_t est = table_.observe(static_cast<std::uint64_t>(row));
  if (est > 0 && est % threshold_ == 0) {
    ++triggers_;
    for (int b = 0; b < banks_; ++b) {
      if (sav.test(static_cast<std::size_t>(b))) {
        out.push_back({PreventiveAction::Kind::RefreshVictims, b, row});
      }
    }
    sav.reset();
  }
}

std::uint64_t AbacusMitigation::estimate(std::int64_t row) const {
  return table_.estimate(static_cast<std::uint64_t>(row));
}

nlohmann::json AbacusMitigation::stats() const {
  return {{"threshold", threshold_}, {"entries", table_.capacity()}, {"triggers", triggers_}};
}

std::unique_ptr<ControllerMitigation> make_controller_mitigation(const MitigationConfig& cfg,
                                                                 const DeviceGeometry& geometry,
                                                                 const TimingParams& timing,
                                                                 std::uint64_t seed) {
  const int banks = geometry.banks_per_channel();
  switch (cfg.mechanism) {
    case Mechanism::PARA:
      return std::make_unique<ParaMitigation>(cfg.para_probability, seed);
    case Mechanism::Graphene:
      return std::make_unique<GrapheneMitigation>(banks, cfg.graphene_entries,
                                                  cfg.graphene_threshold, timing.tREFW);
    case Mechanism::Hydra:
      return std::make_unique<HydraMitigation>(geometry, cfg.hydra_group_threshold,
                                               cfg.hydra_row_threshold, cfg.hydra_groups_per_rank,
                                               cfg.hydra_rcc_entries, timing.tREFW);
    case Mechanism::ABACuS:
      return std::make_unique<AbacusMitigation>(banks, cfg.abacus_entries, cfg.abacus_threshold,
                                                timing.tREFW);
    default:
      return nullptr;
  }
}

}  // namespace rdlab
