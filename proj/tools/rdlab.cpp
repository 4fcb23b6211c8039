#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rdlab/analytic.hpp"
#include "rdlab/attacks.hpp"
#include "rdlab/config.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/experiment.hpp"
#include "rdlab/report.hpp"

using namespace rdlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;
  std::string mech;
  std::uint32_t nrh = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t instructions = 0;
  bool no_cache = false;
  std::string out_dir;
  bool explain = false;
};

void add_config_options(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("-c,--config", a.file, "YAML run-config file");
  cmd->add_option("--set", a.sets, "Override a config key (key=value), repeatable");
  cmd->add_option("--mech", a.mech, "Shorthand for mitigation.mechanism");
  cmd->add_option("--nrh", a.nrh, "Shorthand for mitigation.nrh");
  cmd->add_option("--seed", a.seed, "Shorthand for seed")->each([&a](const std::string&) { a.seed_given = true; });
  cmd->add_option("--instructions", a.instructions, "Shorthand for instructions per core");
  cmd->add_flag("--no-cache", a.no_cache, "Disable the shared last-level cache");
  cmd->add_option("--out-dir", a.out_dir, "Shorthand for output.dir");
  cmd->add_flag("--explain-config", a.explain, "Print effective config with provenance and exit");
}

RunConfig build_config(const ConfigArgs& a) {
  RunConfig cfg = default_run_config();
  if (!a.file.empty()) load_config_file(cfg, a.file);
  if (!a.mech.empty()) set_key(cfg, "mitigation.mechanism", a.mech, Source::Flag);
  if (a.nrh) set_key(cfg, "mitigation.nrh", std::to_string(a.nrh), Source::Flag);
  if (a.seed_given) set_key(cfg, "seed", std::to_string(a.seed), Source::Flag);
  if (a.instructions) set_key(cfg, "instructions", std::to_string(a.instructions), Source::Flag);
  if (a.no_cache) set_key(cfg, "cache.enabled", "false", Source::Flag);
  if (!a.out_dir.empty()) set_key(cfg, "output.dir", a.out_dir, Source::Flag);
  for (const auto& s : a.sets) apply_override(cfg, s);
  cfg.validate();
  return cfg;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::vector<std::uint32_t> pow2_up_to(std::uint32_t hi) {
  std::vector<std::uint32_t> v;
  for (std::uint32_t x = 1; x <= hi; x *= 2) v.push_back(x);
  return v;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string mech = "prac";
  std::vector<int> nbor = {1, 2, 4};
  int nboa = -1;
  std::vector<std::uint32_t> aboth = pow2_up_to(256);
  std::vector<std::uint32_t> rfmth = pow2_up_to(128);
  std::vector<std::uint32_t> nbo = {16, 32, 64, 128, 256};
  bool inflight = false;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  WaveOptions opts;
  opts.inflight_increment = a.inflight;
  std::vector<SweepRow> rows;
  if (a.mech == "prfm") {
    rows = sweep_prfm(a.rfmth, opts);
  } else if (a.mech == "prac") {
    for (int n : a.nbor) {
      if (n < 1) throw ConfigError("--nbor values must be >= 1");
    }
    if (a.nboa < -1) throw ConfigError("--nboa must be >= 0");
    rows = sweep_prac(a.aboth, a.nbor, a.nboa, opts);
  } else if (a.mech == "chronus") {
    const TimingParams t = make_timing(false);
    for (std::uint32_t n : a.nbo) {
      if (n < 1 || n > 256) throw ConfigError("--nbo values must lie in [1, 256]");
      SweepRow r;
      r.mechanism = "chronus";
      r.aboth = n;
      r.nbo_r = 1;
      r.max_hammer = chronus_bound(n, t.tRC, t.tABOact);
      r.secure_min_nrh = r.max_hammer + 1;
      rows.push_back(r);
    }
  } else {
    throw ConfigError("analyze supports --mech prac, prfm or chronus");
  }

  // A higher threshold can never lower the worst case.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const SweepRow& p = rows[i - 1];
    const SweepRow& r = rows[i];
    const bool same_series = p.nbo_r == r.nbo_r && p.mechanism == r.mechanism;
    const bool grows = r.rfm_th >= p.rfm_th && r.aboth >= p.aboth;
    if (same_series && grows && r.max_hammer < p.max_hammer) {
      std::cerr << "rdlab: inconsistent sweep: max_hammer drops from " << p.max_hammer << " to "
                << r.max_hammer << "\n";
      return kExitFailed;
    }
  }
  emit(security_table(rows).to_string(), a.out);
  return kExitOk;
}

// ---- simulate ----

struct SimulateArgs {
  ConfigArgs cfg;
  std::string attack = "none";
  std::int64_t r1 = 0;
  std::uint64_t acts = 1'000'000;
  std::string dump_device;
  std::string out;
};

nlohmann::json attack_document(const RunConfig& cfg, const ResolvedMitigation& rm,
                               const std::string& attack, const AttackResult& r,
                               const nlohmann::json& extra) {
  nlohmann::json eff = nlohmann::json::object();
  for (const auto& [k, v] : cfg.effective()) eff[k] = v;
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"config_hash", cfg.hash()},
                   {"seed", cfg.system.seed},
                   {"attack", attack},
                   {"mitigation", rm.config.to_json()},
                   {"claimed_secure", rm.claimed_secure},
                   {"analytic_worst", rm.worst},
                   {"result", r.to_json()},
                   {"config", eff}};
  if (!extra.is_null()) j["details"] = extra;
  j["verdict"] = r.violations == 0 ? "clean"
                 : rm.claimed_secure ? "violation-in-secure-config"
                                     : "violation-expected-insecure";
  return j;
}

int cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg = build_config(a.cfg);
  if (a.cfg.explain) {
    std::cout << cfg.explain();
    return kExitOk;
  }
  const ResolvedMitigation rm = resolve_mitigation(cfg.system.mitigation);
  nlohmann::json doc;
  bool violated = false;

  if (a.attack == "none" || a.attack == "perf") {
    SystemConfig sys = cfg.system;
    sys.dump_device = !a.dump_device.empty();
    WorkloadSpec wl = cfg.workload;
    wl.mixes = 1;
    if (a.attack == "perf") wl.perf_attack = true;
    const auto loads = build_workloads(wl, sys);
    const RunOutcome o = run_workload(sys, loads.front());
    doc = stats_document(o, cfg.hash(), cfg.system.seed, cfg.effective());
    if (sys.dump_device) emit(o.shared.device_dump.dump(2) + "\n", a.dump_device);
    violated = o.shared.violations > 0 && o.mitigation.claimed_secure;
  } else {
    AttackResult r;
    nlohmann::json extra;
    if (a.attack == "wave") {
      WaveSpec w;
      w.r1 = a.r1 > 0 ? a.r1 : std::max<std::int64_t>(rm.worst_r1, 8);
      w.within_refresh_window = true;
      // The bank grows if the row set does not fit.
      std::int64_t rows = cfg.system.geometry.rows_per_bank;
      while (rows < w.first_row + w.spacing * w.r1 + 8) rows *= 2;
      w.rows_per_bank = rows;
      r = run_wave_attack(rm.config, w);
    } else if (a.attack == "overwhelm") {
      const OverwhelmResult o = run_overwhelm(rm.config);
      r = o.attack;
      extra = {{"hot_rows_forced", o.hot_rows_forced},
               {"rfms_first_backoff", o.rfms_first_backoff},
               {"focus_count", o.focus_count}};
    } else if (a.attack == "random") {
      RandomTrafficSpec s;
      s.activations = a.acts;
      s.seed = cfg.system.seed;
      s.periodic_refresh = cfg.system.refresh.enabled;
      r = run_random_traffic(rm.config, s);
    } else {
      throw ConfigError("unknown attack '" + a.attack + "' (none, wave, overwhelm, random, perf)");
    }
    doc = attack_document(cfg, rm, a.attack, r, extra);
    violated = r.violations > 0 && rm.claimed_secure;
  }
  emit(doc.dump(2) + "\n", a.out);
  if (violated) {
    std::cerr << "rdlab: security violation in a configuration claimed secure\n";
    return kExitViolation;
  }
  return kExitOk;
}

// ---- sweep ----

int cmd_sweep(const ConfigArgs& a) {
  RunConfig cfg = build_config(a);
  if (a.explain) {
    std::cout << cfg.explain();
    return kExitOk;
  }
  int threads = cfg.sweep.threads;
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const SweepResult sweep =
      run_sweep(cfg.system, cfg.sweep.mechanisms, cfg.sweep.nrh, cfg.workload, threads);

  ReportBundle bundle;
  bundle.config_hash = cfg.hash();
  bundle.seed = cfg.system.seed;
  bundle.entries.push_back({"performance", "performance", performance_table(sweep)});
  write_bundle(bundle, cfg.output.dir);
  std::cout << bundle.entries.front().table.to_string();

  int rc = kExitOk;
  const auto failed = sweep.failed();
  if (!failed.empty()) {
    std::cerr << "rdlab: " << failed.size() << " cell(s) failed:\n";
    for (const auto* c : failed) {
      std::cerr << "  " << to_string(c->cell.mechanism) << " nrh=" << c->cell.nrh << " "
                << c->cell.workload << ": " << c->error << "\n";
    }
    rc = kExitFailed;
  }
  for (const auto& c : sweep.cells) {
    if (c.outcome && c.outcome->mitigation.claimed_secure && c.outcome->shared.violations > 0) {
      std::cerr << "rdlab: violation in secure " << to_string(c.cell.mechanism) << " at nrh="
                << c.cell.nrh << "\n";
      rc = kExitViolation;
    }
  }
  return rc;
}

// ---- report ----

struct ReportArgs {
  ConfigArgs cfg;
  std::string check;
};

int cmd_report(const ReportArgs& a) {
  if (!a.check.empty()) {
    const BundleCheck c = validate_bundle(a.check);
    if (c.ok) {
      std::cout << a.check << ": ok (" << c.manifest["sweeps"].size() << " sweeps)\n";
      return kExitOk;
    }
    for (const auto& p : c.problems) std::cerr << p << "\n";
    return kExitFailed;
  }
  RunConfig cfg = build_config(a.cfg);
  if (a.cfg.explain) {
    std::cout << cfg.explain();
    return kExitOk;
  }
  ReportBundle bundle;
  bundle.config_hash = cfg.hash();
  bundle.seed = cfg.system.seed;
  bundle.entries.push_back({"security-prfm", "security", security_table(sweep_prfm(pow2_up_to(128)))});
  bundle.entries.push_back(
      {"security-prac", "security", security_table(sweep_prac(pow2_up_to(256), {1, 2, 4}, -1))});
  const std::vector<Mechanism> mechs = {Mechanism::PRFM,     Mechanism::PRAC,  Mechanism::Chronus,
                                        Mechanism::Graphene, Mechanism::Hydra, Mechanism::PARA,
                                        Mechanism::ABACuS};
  bundle.entries.push_back({"storage", "storage", storage_table(mechs, cfg.sweep.nrh, cfg.system.geometry)});
  bundle.entries.push_back({"dbc", "dbc", dbc_table({1, 2, 4, 8, 16, 32}, {1, 2, 4})});
  write_bundle(bundle, cfg.output.dir);
  std::cout << cfg.output.dir << "/manifest.json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdlab: DRAM read-disturbance lab"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Security sweep of the wave-attack analysis (CSV)");
  an->add_option("--mech", analyze.mech, "prac, prfm or chronus");
  an->add_option("--nbor", analyze.nbor, "N_BO_R values");
  an->add_option("--nboa", analyze.nboa, "N_BO_A (default follows N_BO_R)");
  an->add_option("--aboth", analyze.aboth, "Back-off thresholds");
  an->add_option("--rfmth", analyze.rfmth, "PRFM thresholds");
  an->add_option("--nbo", analyze.nbo, "Chronus back-off thresholds");
  an->add_flag("--inflight", analyze.inflight, "Count the in-flight increment during recovery");
  an->add_option("-o,--out", analyze.out, "Output file (default stdout)");

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Run one configuration and print stats JSON");
  add_config_options(sim, simulate.cfg);
  sim->add_option("--attack", simulate.attack, "none, wave, overwhelm, random or perf");
  sim->add_option("--r1", simulate.r1, "Initial row-set size of the wave attack");
  sim->add_option("--acts", simulate.acts, "Activations for the random attack");
  sim->add_option("--dump-device", simulate.dump_device, "Write the device counters and ATT as JSON");
  sim->add_option("-o,--out", simulate.out, "Output file (default stdout)");

  ConfigArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Performance sweep across mechanisms and N_RH");
  add_config_options(sw, sweep);

  ReportArgs report;
  auto* rep = app.add_subcommand("report", "Write the analytic report bundle, or check one");
  add_config_options(rep, report.cfg);
  rep->add_option("--check", report.check, "Validate an existing bundle directory");

  ConfigArgs explain;
  auto* ex = app.add_subcommand("explain-config", "Print effective config values with provenance");
  add_config_options(ex, explain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*an) return cmd_analyze(analyze);
    if (*sim) return cmd_simulate(simulate);
    if (*sw) return cmd_sweep(sweep);
    if (*rep) return cmd_report(report);
    if (*ex) {
      std::cout << build_config(explain).explain();
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "rdlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "rdlab: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SecurityError& e) {
    std::cerr << "rdlab: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception& e) {
    std::cerr << "rdlab: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitOk;
}
