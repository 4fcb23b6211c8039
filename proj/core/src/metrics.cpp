#include "rdlab/metrics.hpp"

#include <algorithm>
#include <limits>

#include "rdlab/errors.hpp"

namespace rdlab {

CommandCounts& CommandCounts::operator+=(const CommandCounts& o) {
  for (std::size_t i = 0; i < by_kind.size(); ++i) by_kind[i] += o.by_kind[i];
  preventive_acts += o.preventive_acts;
  return *this;
}

void EnergyWeights::validate() const {
  if (act_pre <= 0 || rd <= 0 || wr <= 0 || ref <= 0 || rfm <= 0 || chronus_act_multiplier <= 0) {
    throw ConfigError("energy weights must be positive");
  }
}

EnergyBreakdown energy(const CommandCounts& counts, const EnergyWeights& w, bool chronus_counters) {
  EnergyBreakdown e;
  const double act_weight = w.act_pre * (chronus_counters ? w.chronus_act_multiplier : 1.0);
  e.act = act_weight * static_cast<double>(counts[CommandKind::ACT]);
  e.rd = w.rd * static_cast<double>(counts[CommandKind::RD]);
  e.wr = w.wr * static_cast<double>(counts[CommandKind::WR]);
  e.ref = w.ref * static_cast<double>(counts[CommandKind::REF]);
  e.rfm = w.rfm * static_cast<double>(counts[CommandKind::RFMab]);
  return e;
}

namespace {

void check_ipcs(const std::vector<double>& shared, const std::vector<double>& alone) {
  if (shared.size() != alone.size() || shared.empty()) {
    throw std::invalid_argument("IPC vectors must be non-empty and equally sized");
  }
  for (double a : alone) {
    if (!(a > 0.0)) throw std::invalid_argument("alone IPC must be positive");
  }
}

}  // namespace

double weighted_speedup(const std::vector<double>& shared, const std::vector<double>& alone) {
  check_ipcs(shared, alone);
  double ws = 0.0;
  for (std::size_t i = 0; i < shared.size(); ++i) ws += shared[i] / alone[i];
  return ws;
}

double max_slowdown(const std::vector<double>& shared, const std::vector<double>& alone) {
  check_ipcs(shared, alone);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < shared.size(); ++i) worst = std::min(worst, shared[i] / alone[i]);
  return 1.0 - worst;
}

}  // namespace rdlab
