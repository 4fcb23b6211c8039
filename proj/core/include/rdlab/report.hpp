#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/analytic.hpp"
#include "rdlab/experiment.hpp"
#include "rdlab/geometry.hpp"

namespace rdlab {

inline constexpr int kSchemaVersion = 1;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string to_string() const;
};

// Parses what CsvTable::to_string writes (RFC 4180 quoting).
CsvTable parse_csv(const std::string& text, const std::string& origin);

// The sweep kinds a bundle may name, each with a fixed column list.
struct SweepKind {
  std::string name;
  std::vector<std::string> columns;
};
const std::vector<SweepKind>& sweep_kinds();
const SweepKind& sweep_kind(const std::string& name);

CsvTable security_table(const std::vector<SweepRow>& rows);
CsvTable performance_table(const SweepResult& sweep);
CsvTable storage_table(const std::vector<Mechanism>& mechanisms,
                       const std::vector<std::uint32_t>& nrhs, const DeviceGeometry& geometry);
CsvTable dbc_table(const std::vector<std::uint32_t>& aboths, const std::vector<int>& nbo_rs);

struct BundleEntry {
  std::string name;  // file stem, unique in the bundle
  std::string kind;
  CsvTable table;
};

struct ReportBundle {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<BundleEntry> entries;

  nlohmann::json manifest() const;
};

// Writes <name>.csv per entry plus manifest.json.
void write_bundle(const ReportBundle& bundle, const std::string& dir);

struct BundleCheck {
  bool ok = true;
  std::vector<std::string> problems;
  nlohmann::json manifest;
};
// Schema version, file presence and column headers.
BundleCheck validate_bundle(const std::string& dir);

// Stats document for one simulate run.
nlohmann::json stats_document(const RunOutcome& outcome, const std::string& config_hash,
                              std::uint64_t seed,
                              const std::vector<std::pair<std::string, std::string>>& effective);

}  // namespace rdlab
