#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rdlab/geometry.hpp"

namespace rdlab {

enum class Mapping { RoBaRaCoCh, MOP, ABACuS };

std::string_view to_string(Mapping m);
Mapping parse_mapping(std::string_view name);

struct DecodedAddress {
  int channel = 0;
  int rank = 0;
  int bank_group = 0;
  int bank = 0;
  std::int64_t row = 0;
  int column = 0;

  int flat_bank(const DeviceGeometry& g) const {
    return BankAddress{rank, bank_group, bank}.flat(g);
  }
  bool operator==(const DecodedAddress&) const = default;
};

// Bit slicing above the 64-byte line offset, low to high:
//   RoBaRaCoCh  channel | column | rank | bank | bank group | row
//   MOP         channel | column[1:0] | bank group | bank | rank | column[6:2] | row
//   ABACuS      channel | bank group | bank | rank | column | row
class AddressMapper {
 public:
  AddressMapper(Mapping mapping, const DeviceGeometry& geometry);

  DecodedAddress decode(std::uint64_t addr) const;
  std::uint64_t encode(const DecodedAddress& d) const;

  Mapping mapping() const { return mapping_; }
  const DeviceGeometry& geometry() const { return geometry_; }
  std::uint64_t capacity() const { return capacity_; }

 private:
  enum Field { kChannel, kColumnLo, kColumnHi, kColumn, kRank, kBankGroup, kBank, kRow };
  struct Slice {
    Field field;
    int bits;
  };

  Mapping mapping_;
  DeviceGeometry geometry_;
  std::uint64_t capacity_;
  int offset_bits_;
  Slice slices_[8];
  int slice_count_ = 0;
};

DecodedAddress map_address(std::uint64_t addr, Mapping mapping, const DeviceGeometry& geometry);

}  // namespace rdlab
