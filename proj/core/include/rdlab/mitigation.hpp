#pragma once

#include <bitset>
#include <cstdint>
#include <list>
#include <memory>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/device.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/misra_gries.hpp"
#include "rdlab/timing.hpp"

namespace rdlab {

enum class Mechanism { None, PRFM, PRAC, PRAC_PRFM, Chronus, ChronusPB, Graphene, Hydra, PARA, ABACuS };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);
const std::vector<Mechanism>& all_mechanisms();

bool uses_prac_timing(Mechanism m);
bool uses_prfm(Mechanism m);
bool uses_device_backoff(Mechanism m);
bool uses_chronus_counters(Mechanism m);

struct MitigationConfig {
  Mechanism mechanism = Mechanism::None;
  std::uint32_t nrh = 1000;

  // Zero means "derive the secure value for nrh".
  std::uint32_t aboth = 0;
  int nbo_r = 4;
  int nbo_a = -1;  // -1 follows nbo_r
  std::uint32_t rfm_th = 0;
  std::uint32_t chronus_nbo = 0;

  double para_probability = 0.0;
  std::uint32_t graphene_threshold = 0;
  std::uint64_t graphene_entries = 0;
  std::uint32_t hydra_row_threshold = 0;
  std::uint32_t hydra_group_threshold = 0;
  int hydra_groups_per_rank = 32768;
  int hydra_rcc_entries = 4096;
  std::uint32_t abacus_threshold = 0;
  std::uint64_t abacus_entries = 0;

  int att_capacity = 4;
  bool borrowed_refresh = true;
  bool inflight_increment = false;

  int effective_nbo_a() const { return nbo_a < 0 ? nbo_r : nbo_a; }
  void validate() const;
  nlohmann::json to_json() const;
};

DeviceConfig device_config_for(const MitigationConfig& cfg);

// Activations one bank can receive in a refresh window.
std::uint64_t act_budget_per_window(const TimingParams& timing);
double para_probability_for(std::uint32_t nrh);

struct PreventiveAction {
  enum class Kind { RefreshVictims, ExtraColumnAccess };
  Kind kind = Kind::RefreshVictims;
  int flat_bank = 0;
  std::int64_t row = 0;
};

class ControllerMitigation {
 public:
  virtual ~ControllerMitigation() = default;
  virtual void observe_activation(int flat_bank, std::int64_t row, Ps t,
                                  std::vector<PreventiveAction>& out) = 0;
  virtual std::string_view name() const = 0;
  virtual nlohmann::json stats() const { return nlohmann::json::object(); }
};

class ParaMitigation : public ControllerMitigation {
 public:
  ParaMitigation(double probability, std::uint64_t seed);
  void observe_activation(int flat_bank, std::int64_t row, Ps t,
                          std::vector<PreventiveAction>& out) override;
  std::string_view name() const override { return "PARA"; }
  nlohmann::json stats() const override;

 private:
  double p_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_;
  std::uint64_t triggers_ = 0;
};

class GrapheneMitigation : public ControllerMitigation {
 public:
  GrapheneMitigation(int banks, std::uint64_t entries, std::uint32_t threshold, Ps reset_period);
  void observe_activation(int flat_bank, std::int64_t row, Ps t,
                          std::vector<PreventiveAction>& out) override;
  std::string_view name() const override { return "Graphene"; }
  nlohmann::json stats() const override;
  const MisraGriesTable& table(int flat_bank) const { return *tables_[flat_bank]; }

 private:
  std::uint64_t entries_;
  std::uint32_t threshold_;
  Ps reset_period_;
  Ps next_reset_;
  std::vector<std::unique_ptr<MisraGriesTable>> tables_;
  std::uint64_t triggers_ = 0;
};

class HydraMitigation : public ControllerMitigation {
 public:
  HydraMitigation(const DeviceGeometry& geometry, std::uint32_t group_threshold,
                  std::uint32_t row_threshold, int groups_per_rank, int rcc_entries,
                  Ps reset_period);
  void observe_activation(int flat_bank, std::int64_t row, Ps t,
                          std::vector<PreventiveAction>& out) override;
  std::string_view name() const override { return "Hydra"; }
  nlohmann::json stats() const override;

 private:
  bool rcc_access(std::uint64_t id);

  DeviceGeometry geometry_;
  std::uint32_t group_threshold_;
  std::uint32_t row_threshold_;
  int groups_per_rank_;
  std::uint64_t rows_per_group_;
  std::size_t rcc_entries_;
  Ps reset_period_;
  Ps next_reset_;
  std::vector<std::vector<std::uint32_t>> gct_;
  std::unordered_map<std::uint64_t, std::uint32_t> rct_;
  std::list<std::uint64_t> rcc_lru_;
  std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> rcc_;
  std::uint64_t triggers_ = 0;
  std::uint64_t rcc_misses_ = 0;
};

class AbacusMitigation : public ControllerMitigation {
 public:
  static constexpr int kMaxBanks = 256;

  AbacusMitigation(int banks, std::uint64_t entries, std::uint32_t threshold, Ps reset_period);
  void observe_activation(int flat_bank, std::int64_t row, Ps t,
                          std::vector<PreventiveAction>& out) override;
  std::string_view name() const override { return "ABACuS"; }
  nlohmann::json stats() const override;
  std::uint64_t estimate(std::int64_t row) const;

 private:
  int banks_;
  std::uint32_t threshold_;
  Ps reset_period_;
  Ps next_reset_;
  MisraGriesTable table_;
  std::unordered_map<std::int64_t, std::bitset<kMaxBanks>> siblings_;
  std::uint64_t triggers_ = 0;
};

// Null for mechanisms handled inside the DRAM device or by PRFM counting.
std::unique_ptr<ControllerMitigation> make_controller_mitigation(const MitigationConfig& cfg,
                                                                 const DeviceGeometry& geometry,
                                                                 const TimingParams& timing,
                                                                 std::uint64_t seed);

}  // namespace rdlab
