#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/att.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/time.hpp"

namespace rdlab {

enum class CounterMode { Off, PracOnPrecharge, ChronusCcu };
enum class BackoffPolicy { None, Prac, Chronus };
enum class BackoffPhase { Idle, Window, Recovery, Delay };
enum class RefreshCause { Periodic, Borrowed, Rfm, Preventive };

std::string_view to_string(CounterMode m);
std::string_view to_string(BackoffPolicy p);
std::string_view to_string(BackoffPhase p);
std::string_view to_string(RefreshCause c);

struct DeviceConfig {
  CounterMode counters = CounterMode::Off;
  BackoffPolicy policy = BackoffPolicy::None;
  // A_BOth for PRAC, N_BO for Chronus.
  std::uint32_t threshold = 0;
  int nbo_r = 1;
  int nbo_a = 1;
  int att_capacity = 4;
  Ps alert_latency = 5000;
  bool borrowed_refresh = true;
  int blast_radius = 2;
  int refs_per_window = 8192;

  void validate() const;
};

struct BackoffState {
  BackoffPhase phase = BackoffPhase::Idle;
  Ps asserted_at = kNever;  // when the alert becomes visible to the controller
  int acts_seen_in_delay = 0;
  int rfms_in_recovery = 0;
  BackoffPolicy policy = BackoffPolicy::None;

  bool asserted() const {
    return phase == BackoffPhase::Window || phase == BackoffPhase::Recovery;
  }
};

struct RfmRefresh {
  int flat_bank = 0;
  std::int64_t aggressor = 0;
};

// Victims of an aggressor within the blast radius, clamped at bank edges.
void victims_of(std::int64_t row, std::int64_t rows_per_bank, int radius,
                std::vector<std::int64_t>& out);

class DramDevice {
 public:
  using RefreshListener = std::function<void(int flat_bank, std::int64_t row, RefreshCause, Ps)>;

  DramDevice(const DeviceGeometry& geometry, const DeviceConfig& config);

  // Returns true when the back-off condition fired for this row.
  bool on_activate(int flat_bank, std::int64_t row, Ps t, bool preventive = false);
  // Returns true when this PRE asserted the back-off signal.
  bool on_precharge(int flat_bank, Ps t);
  std::vector<RfmRefresh> on_rfm(int rank, Ps t);
  void on_ref(int rank, Ps t);

  bool alert_visible(int rank, Ps now) const;
  const BackoffState& backoff(int rank) const { return backoff_[rank]; }

  std::optional<std::int64_t> open_row(int flat_bank) const;
  bool rank_closed(int rank) const;

  // Activations since the row's last reset, as the device sees them.
  std::uint32_t activation_count(int flat_bank, std::int64_t row) const;
  std::uint8_t raw_ccu_counter(int flat_bank, std::int64_t row) const;
  const AggressorTrackingTable& att(int flat_bank) const { return banks_[flat_bank].att; }
  bool any_hot_tracked(int rank) const;

  std::uint64_t ref_wraps(int rank) const { return ref_state_[rank].wraps; }
  std::uint64_t borrowed_refreshes() const { return borrowed_; }
  std::uint64_t suppressed_alerts() const { return suppressed_; }

  void set_refresh_listener(RefreshListener listener) { listener_ = std::move(listener); }

  const DeviceConfig& config() const { return config_; }
  const DeviceGeometry& geometry() const { return geometry_; }
  std::uint32_t ccu_preload() const { return preload_; }

  nlohmann::json dump() const;

 private:
  struct Bank {
    std::optional<std::int64_t> open;
    bool pending_hot = false;
    std::unordered_map<std::int64_t, std::uint32_t> counters;
    // PRAC counters ordered by (count desc, row asc) so an RFM finds the hottest row.
    std::set<std::pair<std::int64_t, std::int64_t>> ranked;
    AggressorTrackingTable att;
  };
  struct RefState {
    int pointer = 0;
    std::uint64_t issued = 0;
    std::uint64_t wraps = 0;
    Ps last_ref = kLongAgo;
    Ps last_borrow = kLongAgo;
  };

  int rank_of(int flat_bank) const { return flat_bank / geometry_.banks_per_rank(); }
  std::uint32_t ccu_acts(std::uint8_t raw) const;
  void refresh_victims(int flat_bank, std::int64_t aggressor, RefreshCause cause, Ps t);
  void reset_row(int flat_bank, std::int64_t row);
  void try_assert(int rank, Ps t);

  DeviceGeometry geometry_;
  DeviceConfig config_;
  std::uint32_t preload_ = 0;  // Chronus down-counter start, 256 stored as 0
  std::vector<Bank> banks_;
  std::vector<BackoffState> backoff_;
  std::vector<RefState> ref_state_;
  RefreshListener listener_;
  std::vector<std::int64_t> scratch_;
  std::uint64_t borrowed_ = 0;
  std::uint64_t suppressed_ = 0;
};

}  // namespace rdlab
