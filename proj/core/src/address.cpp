#include "rdlab/address.hpp"

#include <bit>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

int log2_exact(std::uint64_t v) { return std::countr_zero(v); }

}  // namespace

std::uint64_t DeviceGeometry::capacity_bytes() const {
  return static_cast<std::uint64_t>(channels) * ranks * bank_groups * banks_per_group *
         static_cast<std::uint64_t>(rows_per_bank) * columns_per_row() * line_bytes;
}

void DeviceGeometry::validate() const {
  if (channels < 1 || ranks < 1 || bank_groups < 1 || banks_per_group < 1 ||
      rows_per_bank < 1 || row_size_bits < 1 || line_bytes < 1) {
    throw ConfigError("geometry counts must be >= 1");
  }
}

bool DeviceGeometry::power_of_two_fields() const {
  auto p2 = [](std::uint64_t v) { return std::has_single_bit(v); };
  return p2(channels) && p2(ranks) && p2(bank_groups) && p2(banks_per_group) &&
         p2(static_cast<std::uint64_t>(rows_per_bank)) && p2(columns_per_row()) &&
         p2(line_bytes);
}

std::string_view to_string(Mapping m) {
  switch (m) {
    case Mapping::RoBaRaCoCh: return "RoBaRaCoCh";
    case Mapping::MOP: return "MOP";
    case Mapping::ABACuS: return "ABACuS";
  }
  return "?";
}

Mapping parse_mapping(std::string_view name) {
  if (name == "RoBaRaCoCh") return Mapping::RoBaRaCoCh;
  if (name == "MOP") return Mapping::MOP;
  if (name == "ABACuS") return Mapping::ABACuS;
  throw ConfigError("unknown address mapping '" + std::string(name) + "'");
}

AddressMapper::AddressMapper(Mapping mapping, const DeviceGeometry& geometry)
    : mapping_(mapping), geometry_(geometry), capacity_(geometry.capacity_bytes()) {
  geometry.validate();
  if (!geometry.power_of_two_fields()) {
    throw ConfigError("address mapping needs power-of-two geometry fields");
  }
  offset_bits_ = log2_exact(geometry.line_bytes);
  const int ch = log2_exact(geometry.channels);
  const int col = log2_exact(geometry.columns_per_row());
  const int ra = log2_exact(geometry.ranks);
  const int bg = log2_exact(geometry.bank_groups);
  const int ba = log2_exact(geometry.banks_per_group);
  const int ro = log2_exact(static_cast<std::uint64_t>(geometry.rows_per_bank));

  auto push = [this](Field f, int bits) { slices_[slice_count_++] = Slice{f, bits}; };
  switch (mapping) {
    case Mapping::RoBaRaCoCh:
      push(kChannel, ch);
      push(kColumn, col);
      push(kRank, ra);
      push(kBank, ba);
      push(kBankGroup, bg);
      push(kRow, ro);
      break;
    case Mapping::MOP: {
      const int lo = col < 2 ? col : 2;
      push(kChannel, ch);
      push(kColumnLo, lo);
      push(kBankGroup, bg);
      push(kBank, ba);
      push(kRank, ra);
      push(kColumnHi, col - lo);
      push(kRow, ro);
      break;
    }
    case Mapping::ABACuS:
      push(kChannel, ch);
      push(kBankGroup, bg);
      push(kBank, ba);
      push(kRank, ra);
      push(kColumn, col);
      push(kRow, ro);
      break;
  }
}

DecodedAddress AddressMapper::decode(std::uint64_t addr) const {
  if (addr >= capacity_) throw ConfigError("address out of range");
  DecodedAddress d;
  std::uint64_t rest = addr >> offset_bits_;
  int column_lo_bits = 0;
  for (int i = 0; i < slice_count_; ++i) {
    const Slice& s = slices_[i];
    const std::uint64_t v = rest & ((std::uint64_t{1} << s.bits) - 1);
    rest >>= s.bits;
    switch (s.field) {
      case kChannel: d.channel = static_cast<int>(v); break;
      case kColumn: d.column = static_cast<int>(v); break;
      case kColumnLo:
        d.column |= static_cast<int>(v);
        column_lo_bits = s.bits;
        break;
      case kColumnHi: d.column |= static_cast<int>(v << column_lo_bits); break;
      case kRank: d.rank = static_cast<int>(v); break;
      case kBankGroup: d.bank_group = static_cast<int>(v); break;
      case kBank: d.bank = static_cast<int>(v); break;
      case kRow: d.row = static_cast<std::int64_t>(v); break;
    }
  }
  return d;
}

std::uint64_t AddressMapper::encode(const DecodedAddress& d) const {
  std::uint64_t addr = 0;
  int shift = offset_bits_;
  int column_lo_bits = 0;
  for (int i = 0; i < slice_count_; ++i) {
    const Slice& s = slices_[i];
    const std::uint64_t mask = (std::uint64_t{1} << s.bits) - 1;
    std::uint64_t v = 0;
    switch (s.field) {
      case kChannel: v = static_cast<std::uint64_t>(d.channel); break;
      case kColumn: v = static_cast<std::uint64_t>(d.column); break;
      case kColumnLo:
        v = static_cast<std::uint64_t>(d.column);
        column_lo_bits = s.bits;
        break;
      case kColumnHi: v = static_cast<std::uint64_t>(d.column) >> column_lo_bits; break;
      case kRank: v = static_cast<std::uint64_t>(d.rank); break;
      case kBankGroup: v = static_cast<std::uint64_t>(d.bank_group); break;
      case kBank: v = static_cast<std::uint64_t>(d.bank); break;
      case kRow: v = static_cast<std::uint64_t>(d.row); break;
    }
    addr |= (v & mask) << shift;
    shift += s.bits;
  }
  return addr;
}

DecodedAddress map_address(std::uint64_t addr, Mapping mapping, const DeviceGeometry& geometry) {
  return AddressMapper(mapping, geometry).decode(addr);
}

}  // namespace rdlab
