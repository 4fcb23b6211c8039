#include "rdlab/device.hpp"

#include <algorithm>
#include <string>

#include "rdlab/decrementer.hpp"
#include "rdlab/errors.hpp"

namespace rdlab {

std::string_view to_string(CounterMode m) {
  switch (m) {
    case CounterMode::Off: return "off";
    case CounterMode::PracOnPrecharge: return "prac";
    case CounterMode::ChronusCcu: return "ccu";
  }
  return "?";
}

std::string_view to_string(BackoffPolicy p) {
  switch (p) {
    case BackoffPolicy::None: return "none";
    case BackoffPolicy::Prac: return "prac";
    case BackoffPolicy::Chronus: return "chronus";
  }
  return "?";
}

std::string_view to_string(BackoffPhase p) {
  switch (p) {
    case BackoffPhase::Idle: return "idle";
    case BackoffPhase::Window: return "normal-traffic-window";
    case BackoffPhase::Recovery: return "recovery";
    case BackoffPhase::Delay: return "delay";
  }
  return "?";
}

std::string_view to_string(RefreshCause c) {
  switch (c) {
    case RefreshCause::Periodic: return "periodic";
    case RefreshCause::Borrowed: return "borrowed";
    case RefreshCause::Rfm: return "rfm";
    case RefreshCause::Preventive: return "preventive";
  }
  return "?";
}

void DeviceConfig::validate() const {
  if (policy != BackoffPolicy::None && counters == CounterMode::Off) {
    throw ConfigError("a back-off policy needs activation counters");
  }
  if (policy != BackoffPolicy::None && threshold < 1) {
    throw ConfigError("back-off threshold must be >= 1");
  }
  if (nbo_r < 1) throw ConfigError("N_BO_R must be >= 1");
  if (nbo_a < 0) throw ConfigError("N_BO_A must be >= 0");
  if (att_capacity < 1) throw ConfigError("ATT capacity must be >= 1");
  if (alert_latency < 0) throw ConfigError("alert latency must be >= 0");
  if (blast_radius < 1) throw ConfigError("blast radius must be >= 1");
  if (refs_per_window < 1) throw ConfigError("refs_per_window must be >= 1");
}

void victims_of(std::int64_t row, std::int64_t rows_per_bank, int radius,
                std::vector<std::int64_t>& out) {
  out.clear();
  for (int d = -radius; d <= radius; ++d) {
    if (d == 0) continue;
    const std::int64_t v = row + d;
    if (v >= 0 && v < rows_per_bank) out.push_back(v);
  }
}

DramDevice::DramDevice(const DeviceGeometry& geometry, const DeviceConfig& config)
    : geometry_(geometry), config_(config) {
  geometry.validate();
  config.validate();
  preload_ = std::min<std::uint32_t>(256, std::max<std::uint32_t>(1, config.threshold));
  banks_.reserve(static_cast<std::size_t>(geometry.banks_per_channel()));
  for (int i = 0; i < geometry.banks_per_channel(); ++i) {
    banks_.push_back(Bank{std::nullopt, false, {}, {}, AggressorTrackingTable(config.att_capacity)});
  }
  backoff_.resize(static_cast<std::size_t>(geometry.ranks));
  for (auto& b : backoff_) b.policy = config.policy;
  ref_state_.resize(static_cast<std::size_t>(geometry.ranks));
}

std::uint32_t DramDevice::ccu_acts(std::uint8_t raw) const {
  const int p = static_cast<int>(preload_ & 0xFF);
  return static_cast<std::uint32_t>(((p - static_cast<int>(raw) - 1) % 256 + 256) % 256 + 1);
}

bool DramDevice::on_activate(int flat_bank, std::int64_t row, Ps t, bool preventive) {
  Bank& bank = banks_[flat_bank];
  if (bank.open) {
    throw ProtocolError("ACT to open bank " + std::to_string(flat_bank));
  }
  if (row < 0 || row >= geometry_.rows_per_bank) throw ProtocolError("row out of range");
  bank.open = row;
  bank.pending_hot = false;

  if (preventive) {
    if (listener_) listener_(flat_bank, row, RefreshCause::Preventive, t);
    return false;
  }

  BackoffState& bo = backoff_[rank_of(flat_bank)];
  if (bo.phase == BackoffPhase::Delay) {
    if (++bo.acts_seen_in_delay >= config_.nbo_a) {
      bo.phase = BackoffPhase::Idle;
      bo.asserted_at = kNever;
    }
  }

  if (config_.counters != CounterMode::ChronusCcu) return false;

  auto it = bank.counters.find(row);
  const std::uint8_t current =
      it == bank.counters.end() ? static_cast<std::uint8_t>(preload_ & 0xFF)
                                : static_cast<std::uint8_t>(it->second);
  const std::uint8_t next = decrement8(current);
  bank.counters[row] = next;
  const std::uint32_t acts = ccu_acts(next);
  bank.att.update(row, acts, t);
  bank.pending_hot = config_.threshold > 0 && acts >= std::min(preload_, config_.threshold);
  return bank.pending_hot;
}

bool DramDevice::on_precharge(int flat_bank, Ps t) {
  Bank& bank = banks_[flat_bank];
  if (!bank.open) {
    throw ProtocolError("PRE to closed bank " + std::to_string(flat_bank));
  }
  const std::int64_t row = *bank.open;
  bank.open.reset();

  bool fire = false;
  if (config_.counters == CounterMode::PracOnPrecharge) {
    std::uint32_t& slot = bank.counters[row];
    if (slot > 0) bank.ranked.erase({-static_cast<std::int64_t>(slot), row});
    const std::uint32_t count = ++slot;
    bank.ranked.insert({-static_cast<std::int64_t>(count), row});
    bank.att.update(row, count, t);
    fire = config_.threshold > 0 && count >= config_.threshold;
  } else if (config_.counters == CounterMode::ChronusCcu) {
    fire = bank.pending_hot;
  }
  bank.pending_hot = false;

  if (!fire || config_.policy == BackoffPolicy::None) return false;
  const int rank = rank_of(flat_bank);
  const bool was_idle = backoff_[rank].phase == BackoffPhase::Idle;
  try_assert(rank, t);
  return was_idle && backoff_[rank].asserted();
}

void DramDevice::try_assert(int rank, Ps t) {
  BackoffState& bo = backoff_[rank];
  if (bo.phase == BackoffPhase::Delay) {
    ++suppressed_;
    return;
  }
  if (bo.phase != BackoffPhase::Idle) return;
  bo.phase = BackoffPhase::Window;
  bo.asserted_at = t + config_.alert_latency;
  bo.rfms_in_recovery = 0;
  bo.acts_seen_in_delay = 0;
}

bool DramDevice::alert_visible(int rank, Ps now) const {
  const BackoffState& bo = backoff_[rank];
  return bo.asserted() && bo.asserted_at <= now;
}

std::optional<std::int64_t> DramDevice::open_row(int flat_bank) const {
  return banks_[flat_bank].open;
}

bool DramDevice::rank_closed(int rank) const {
  const int per = geometry_.banks_per_rank();
  for (int b = rank * per; b < (rank + 1) * per; ++b) {
    if (banks_[b].open) return false;
  }
  return true;
}

std::uint32_t DramDevice::activation_count(int flat_bank, std::int64_t row) const {
  const Bank& bank = banks_[flat_bank];
  auto it = bank.counters.find(row);
  if (it == bank.counters.end()) return 0;
  if (config_.counters == CounterMode::ChronusCcu) {
    return ccu_acts(static_cast<std::uint8_t>(it->second));
  }
  return it->second;
}

std::uint8_t DramDevice::raw_ccu_counter(int flat_bank, std::int64_t row) const {
  const Bank& bank = banks_[flat_bank];
  auto it = bank.counters.find(row);
  if (it == bank.counters.end()) return static_cast<std::uint8_t>(preload_ & 0xFF);
  return static_cast<std::uint8_t>(it->second);
}

bool DramDevice::any_hot_tracked(int rank) const {
  const int per = geometry_.banks_per_rank();
  for (int b = rank * per; b < (rank + 1) * per; ++b) {
    if (banks_[b].att.any_at_least(std::min(preload_, config_.threshold))) return true;
  }
  return false;
}

void DramDevice::refresh_victims(int flat_bank, std::int64_t aggressor, RefreshCause cause, Ps t) {
  victims_of(aggressor, geometry_.rows_per_bank, config_.blast_radius, scratch_);
  if (!listener_) return;
  for (std::int64_t v : scratch_) listener_(flat_bank, v, cause, t);
}

void DramDevice::reset_row(int flat_bank, std::int64_t row) {
  Bank& bank = banks_[flat_bank];
  if (config_.counters == CounterMode::PracOnPrecharge) {
    auto it = bank.counters.find(row);
    if (it != bank.counters.end()) bank.ranked.erase({-static_cast<std::int64_t>(it->second), row});
  }
  bank.counters.erase(row);
  banks_[flat_bank].att.remove(row);
}

std::vector<RfmRefresh> DramDevice::on_rfm(int rank, Ps t) {
  if (!rank_closed(rank)) throw ProtocolError("RFMab with open banks in rank " + std::to_string(rank));
  std::vector<RfmRefresh> done;
  const int per = geometry_.banks_per_rank();
  const bool chronus = config_.policy == BackoffPolicy::Chronus;
  const std::uint32_t hot = std::min(preload_, config_.threshold);
  if (config_.counters != CounterMode::Off) {
    for (int b = rank * per; b < (rank + 1) * per; ++b) {
      Bank& bank = banks_[b];
      std::optional<std::int64_t> pick;
      if (chronus) {
        if (auto e = bank.att.max_entry_at_least(hot)) pick = e->row;
      } else if (!bank.ranked.empty()) {
        pick = bank.ranked.begin()->second;
      }
      if (!pick) continue;
      refresh_victims(b, *pick, RefreshCause::Rfm, t);
      reset_row(b, *pick);
      done.push_back(RfmRefresh{b, *pick});
    }
  }

  BackoffState& bo = backoff_[rank];
  if (bo.asserted()) {
    bo.phase = BackoffPhase::Recovery;
    ++bo.rfms_in_recovery;
    if (config_.policy == BackoffPolicy::Prac) {
      if (bo.rfms_in_recovery >= config_.nbo_r) {
        bo.asserted_at = kNever;
        bo.acts_seen_in_delay = 0;
        bo.phase = config_.nbo_a > 0 ? BackoffPhase::Delay : BackoffPhase::Idle;
      }
    } else if (!any_hot_tracked(rank)) {
      bo.phase = BackoffPhase::Idle;
      bo.asserted_at = kNever;
    }
  }
  return done;
}

void DramDevice::on_ref(int rank, Ps t) {
  if (!rank_closed(rank)) throw ProtocolError("REF with open banks in rank " + std::to_string(rank));
  RefState& rs = ref_state_[rank];
  const std::int64_t rows = geometry_.rows_per_bank;
  const std::int64_t stripe = (rows + config_.refs_per_window - 1) / config_.refs_per_window;
  const std::int64_t first = static_cast<std::int64_t>(rs.pointer) * stripe;
  const std::int64_t last = std::min(rows, first + stripe);
  const int per = geometry_.banks_per_rank();
  const int radius = config_.blast_radius;

  for (int b = rank * per; b < (rank + 1) * per; ++b) {
    for (std::int64_t r = first; r < last; ++r) {
      if (listener_) listener_(b, r, RefreshCause::Periodic, t);
    }
    if (config_.counters == CounterMode::Off) continue;
    // A counter may only be cleared once every victim of that row is fresh.
    for (std::int64_t r = first; r < last; ++r) {
      const std::int64_t lo = std::max<std::int64_t>(0, r - radius);
      const std::int64_t hi = std::min<std::int64_t>(rows - 1, r + radius);
      if (lo >= first && hi < last) reset_row(b, r);
    }
  }

  const bool borrow = config_.borrowed_refresh && config_.counters != CounterMode::Off &&
                      (rs.issued % 2 == 1);
  if (borrow) {
    for (int b = rank * per; b < (rank + 1) * per; ++b) {
      auto pick = banks_[b].att.max_entry_since(rs.last_borrow);
      if (!pick) continue;
      refresh_victims(b, pick->row, RefreshCause::Borrowed, t);
      reset_row(b, pick->row);
      ++borrowed_;
    }
    rs.last_borrow = t;
  }

  ++rs.issued;
  rs.last_ref = t;
  if (++rs.pointer >= config_.refs_per_window) {
    rs.pointer = 0;
    ++rs.wraps;
  }
}

nlohmann::json DramDevice::dump() const {
  nlohmann::json out;
  out["counter_mode"] = to_string(config_.counters);
  out["policy"] = to_string(config_.policy);
  out["threshold"] = config_.threshold;
  nlohmann::json banks = nlohmann::json::array();
  for (std::size_t b = 0; b < banks_.size(); ++b) {
    const Bank& bank = banks_[b];
    if (bank.counters.empty() && bank.att.size() == 0) continue;
    std::vector<std::pair<std::int64_t, std::uint32_t>> rows(bank.counters.begin(),
                                                             bank.counters.end());
    std::sort(rows.begin(), rows.end());
    nlohmann::json counters = nlohmann::json::array();
    for (const auto& [row, raw] : rows) {
      nlohmann::json c{{"row", row}, {"raw", raw}};
      c["activations"] = config_.counters == CounterMode::ChronusCcu
                             ? ccu_acts(static_cast<std::uint8_t>(raw))
                             : raw;
      counters.push_back(c);
    }
    nlohmann::json att = nlohmann::json::array();
    for (const auto& e : bank.att.entries()) {
      att.push_back({{"row", e.row}, {"count", e.count}});
    }
    banks.push_back({{"bank", b}, {"counters", counters}, {"att", att}});
  }
  out["banks"] = banks;
  nlohmann::json ranks = nlohmann::json::array();
  for (std::size_t r = 0; r < backoff_.size(); ++r) {
    ranks.push_back({{"rank", r},
                     {"phase", to_string(backoff_[r].phase)},
                     {"ref_pointer", ref_state_[r].pointer},
                     {"ref_wraps", ref_state_[r].wraps}});
  }
  out["ranks"] = ranks;
  return out;
}

}  // namespace rdlab
