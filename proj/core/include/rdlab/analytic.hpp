#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdlab/mitigation.hpp"
#include "rdlab/timing.hpp"

namespace rdlab {

struct WaveOptions {
  // Charge the A_BOth-1 pre-hammer ACTs of every row against tREFW.
  bool charge_prehammer = true;
  // One RFM can land after a further in-flight ACT to the same row.
  bool inflight_increment = false;
};

// Rounds of the balanced wave attack: |R_i| for i = 1.. until it reaches 0.
std::vector<std::int64_t> prfm_rounds(std::uint32_t rfm_th, std::int64_t r1);
std::vector<std::int64_t> prac_rounds(std::uint32_t aboth, int nbo_r, int nbo_a, std::int64_t r1,
                                      const TimingParams& timing);

// ACT slots in the normal-traffic window.
int a_normal(const TimingParams& timing);

struct Hammer {
  std::uint32_t max_hammer = 0;
  std::int64_t r1 = 0;
};

// Max hammer count of the last surviving row for one R1, within tREFW.
std::uint32_t prfm_max_hammer(std::uint32_t rfm_th, std::int64_t r1, const TimingParams& timing,
                              const WaveOptions& opts = {});
std::uint32_t prac_max_hammer(std::uint32_t aboth, int nbo_r, int nbo_a, std::int64_t r1,
                              const TimingParams& timing, const WaveOptions& opts = {});

// Worst case over every R1 that fits in tREFW.
Hammer prfm_worst(std::uint32_t rfm_th, const TimingParams& timing, const WaveOptions& opts = {});
Hammer prac_worst(std::uint32_t aboth, int nbo_r, int nbo_a, const TimingParams& timing,
                  const WaveOptions& opts = {});

std::uint32_t chronus_bound(std::uint32_t nbo, Ps trc, Ps taboact);
int att_min_size(Ps trc, Ps taboact);

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
// Share of DRAM time spent in preventive refresh under the repeated
// single-bank back-off pattern.
Fraction dbc_prac(std::uint32_t aboth, int nbo_r, Ps trfm, Ps trc);

struct DbcChain {
  double measured = 0.0;
  double bound = 0.0;
  double backoffs = 0.0;           // back-offs implied by the measured share
  double refresh_time = 0.0;       // time those back-offs spend refreshing
  double remaining_time = 0.0;     // what is left of the window
  double trigger_time = 0.0;       // time needed to trigger them
  bool feasible = true;            // trigger time fits in the remaining time
  bool passes = true;              // measured share within the bound
};
// Checks one measured schedule against the bound: `rfm_time` of RFM work
// observed in a window of length `window`.
DbcChain dbc_chain(Ps rfm_time, Ps window, std::uint32_t aboth, int nbo_r, Ps trfm, Ps trc);

// Least aggressive secure parameters, with the worst case they give.
struct SecureConfig {
  MitigationConfig config;
  std::uint32_t worst = 0;
  std::int64_t worst_r1 = 0;
};
std::optional<SecureConfig> find_secure_config(Mechanism mechanism, std::uint32_t nrh,
                                               int prac_n = 4, const WaveOptions& opts = {});

// Worst-case max hammer of an explicit configuration under the timing its
// mechanism uses.
Hammer worst_case(const MitigationConfig& cfg, const WaveOptions& opts = {});

struct SweepRow {
  std::string mechanism;
  std::uint32_t rfm_th = 0;
  std::uint32_t aboth = 0;
  int nbo_r = 0;
  int nbo_a = 0;
  std::uint32_t max_hammer = 0;
  std::int64_t worst_r1 = 0;
  std::uint32_t secure_min_nrh = 0;
};
std::vector<SweepRow> sweep_prfm(const std::vector<std::uint32_t>& thresholds,
                                 const WaveOptions& opts = {});
std::vector<SweepRow> sweep_prac(const std::vector<std::uint32_t>& aboths,
                                 const std::vector<int>& nbo_rs, int nbo_a,
                                 const WaveOptions& opts = {});

}  // namespace rdlab
