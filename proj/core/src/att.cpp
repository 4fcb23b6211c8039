#include "rdlab/att.hpp"

#include <algorithm>

#include "rdlab/errors.hpp"

namespace rdlab {

AggressorTrackingTable::AggressorTrackingTable(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("ATT capacity must be >= 1");
  slots_.reserve(static_cast<std::size_t>(capacity));
}

bool AggressorTrackingTable::update(std::int64_t row, std::uint32_t count, Ps t) {
  for (auto& e : slots_) {
    if (e.row == row) {
      e.count = count;
      e.updated = t;
      return true;
    }
  }
  if (size() < capacity_) {
    slots_.push_back(AttEntry{row, count, t});
    return true;
  }
  auto victim = std::min_element(slots_.begin(), slots_.end(),
                                 [](const AttEntry& a, const AttEntry& b) {
                                   if (a.count != b.count) return a.count < b.count;
                                   return a.row > b.row;
                                 });
  if (count > victim->count) {
    *victim = AttEntry{row, count, t};
    return true;
  }
  return false;
}

namespace {

template <typename Pred>
std::optional<AttEntry> best(const std::vector<AttEntry>& slots, Pred keep) {
  std::optional<AttEntry> out;
  for (const auto& e : slots) {
    if (!keep(e)) continue;
    if (!out || e.count > out->count || (e.count == out->count && e.row < out->row)) out = e;
  }
  return out;
}

}  // namespace

std::optional<AttEntry> AggressorTrackingTable::max_entry() const {
  return best(slots_, [](const AttEntry&) { return true; });
}

std::optional<AttEntry> AggressorTrackingTable::max_entry_since(Ps since) const {
  return best(slots_, [since](const AttEntry& e) { return e.updated >= since; });
}

std::optional<AttEntry> AggressorTrackingTable::max_entry_at_least(std::uint32_t threshold) const {
  return best(slots_, [threshold](const AttEntry& e) { return e.count >= threshold; });
}

bool AggressorTrackingTable::any_at_least(std::uint32_t threshold) const {
  return std::any_of(slots_.begin(), slots_.end(),
                     [threshold](const AttEntry& e) { return e.count >= threshold; });
}

bool AggressorTrackingTable::remove(std::int64_t row) {
  auto it = std::find_if(slots_.begin(), slots_.end(),
                         [row](const AttEntry& e) { return e.row == row; });
  if (it == slots_.end()) return false;
  slots_.erase(it);
  return true;
}

bool AggressorTrackingTable::contains(std::int64_t row) const { return count_of(row).has_value(); }

std::optional<std::uint32_t> AggressorTrackingTable::count_of(std::int64_t row) const {
  for (const auto& e : slots_) {
    if (e.row == row) return e.count;
  }
  return std::nullopt;
}

void AggressorTrackingTable::clear() { slots_.clear(); }

}  // namespace rdlab
