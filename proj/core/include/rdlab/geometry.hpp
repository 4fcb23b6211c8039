#pragma once

#include <cstdint>

namespace rdlab {

struct DeviceGeometry {
  int channels = 1;
  int ranks = 2;
  int bank_groups = 8;
  int banks_per_group = 4;
  std::int64_t rows_per_bank = 65536;
  std::int64_t row_size_bits = 16384;
  int line_bytes = 64;

  int banks_per_rank() const { return bank_groups * banks_per_group; }
  int banks_per_channel() const { return ranks * banks_per_rank(); }
  // Cache lines held by one row across the rank's chips (8 KiB module row).
  int columns_per_row() const { return 128; }
  std::uint64_t capacity_bytes() const;

  void validate() const;
  bool power_of_two_fields() const;
};

struct BankAddress {
  int rank = 0;
  int bank_group = 0;
  int bank = 0;

  int flat(const DeviceGeometry& g) const {
    return (rank * g.bank_groups + bank_group) * g.banks_per_group + bank;
  }
  static BankAddress from_flat(const DeviceGeometry& g, int flat) {
    BankAddress a;
    a.bank = flat % g.banks_per_group;
    a.bank_group = (flat / g.banks_per_group) % g.bank_groups;
    a.rank = flat / g.banks_per_rank();
    return a;
  }
};

}  // namespace rdlab
