#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdlab/experiment.hpp"
#include "rdlab/system.hpp"

namespace rdlab {

enum class Source { Default, File, Flag };
const char* to_string(Source s);

struct SweepSpec {
  std::vector<Mechanism> mechanisms = {Mechanism::PRAC, Mechanism::Chronus};
  std::vector<std::uint32_t> nrh = default_nrh_grid();
  int threads = 0;  // 0 uses the hardware concurrency
};

struct OutputSpec {
  std::string dir = "rdlab-out";
};

struct RunConfig {
  SystemConfig system;
  WorkloadSpec workload;
  SweepSpec sweep;
  OutputSpec output;

  // Dotted key -> where its current value came from.
  std::map<std::string, Source> provenance;

  // Key -> effective value, in registry order.
  std::vector<std::pair<std::string, std::string>> effective() const;
  std::string explain() const;
  // Stable 64-bit FNV-1a over the effective key/value listing, as hex.
  std::string hash() const;
  void validate() const;
};

const std::vector<std::string>& config_keys();

RunConfig default_run_config();
// Parses YAML text; unknown keys and malformed values throw ConfigError.
void apply_yaml(RunConfig& cfg, const std::string& text, const std::string& origin);
void load_config_file(RunConfig& cfg, const std::string& path);
// "key=value" from the command line.
void apply_override(RunConfig& cfg, const std::string& assignment);
void set_key(RunConfig& cfg, const std::string& key, const std::string& value, Source source);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace rdlab
