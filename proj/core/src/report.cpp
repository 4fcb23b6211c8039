#include "rdlab/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rdlab/errors.hpp"
#include "rdlab/storage.hpp"

namespace rdlab {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string num(T v) {
  return std::to_string(v);
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

}  // namespace

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " fields, expected " +
                                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote(fields[i]);
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      if (!field.empty()) throw ParseError(origin, line, "stray quote inside a field");
      quoted = true;
      any = true;
    } else if (ch == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
      ++line;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ParseError(origin, line, "unterminated quoted field");
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ParseError(origin, 1, "missing header row");
  CsvTable t;
  t.columns = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.columns.size()) {
      throw ParseError(origin, r + 1,
                       "expected " + std::to_string(t.columns.size()) + " fields, found " +
                           std::to_string(records[r].size()));
    }
    t.rows.push_back(records[r]);
  }
  return t;
}

const std::vector<SweepKind>& sweep_kinds() {
  static const std::vector<SweepKind> kinds = {
      {"security",
       {"mechanism", "rfm_th", "aboth", "nbo_r", "nbo_a", "max_hammer", "worst_r1", "secure_min_nrh"}},
      {"performance",
       {"mechanism", "nrh", "workload", "weighted_speedup", "normalized_ws", "max_slowdown",
        "energy_total", "energy_act", "energy_rfm", "rfms", "backoffs", "max_exposure", "violations",
        "claimed_secure", "status"}},
      {"storage", {"mechanism", "nrh", "cpu_bytes", "dram_bytes", "entries"}},
      {"dbc", {"aboth", "nbo_r", "trfm_ns", "trc_ns", "numerator", "denominator", "fraction"}},
  };
  return kinds;
}

const SweepKind& sweep_kind(const std::string& name) {
  for (const auto& k : sweep_kinds()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown sweep kind '" + name + "'");
}

CsvTable security_table(const std::vector<SweepRow>& rows) {
  CsvTable t{sweep_kind("security").columns, {}};
  for (const SweepRow& r : rows) {
    t.add({r.mechanism, num(r.rfm_th), num(r.aboth), num(r.nbo_r), num(r.nbo_a), num(r.max_hammer),
           num(r.worst_r1), num(r.secure_min_nrh)});
  }
  return t;
}

CsvTable performance_table(const SweepResult& sweep) {
  CsvTable t{sweep_kind("performance").columns, {}};
  for (const SweepCellResult& c : sweep.cells) {
    const std::string mech(to_string(c.cell.mechanism));
    if (!c.outcome) {
      t.add({mech, num(c.cell.nrh), c.cell.workload, "", "", "", "", "", "", "", "", "", "", "",
             "failed: " + c.error});
      continue;
    }
    const RunOutcome& o = *c.outcome;
    const SystemResult& s = o.shared;
    std::string status = "ok";
    if (s.timed_out) status = "timed-out";
    if (s.violations > 0 && o.mitigation.claimed_secure) status = "violation";
    t.add({mech, num(c.cell.nrh), c.cell.workload, num(o.weighted_speedup), num(c.normalized_ws),
           num(o.max_slowdown), num(s.energy.total()), num(s.energy.act), num(s.energy.rfm),
           num(s.rfms), num(s.backoffs), num(s.max_exposure), num(s.violations),
           o.mitigation.claimed_secure ? "true" : "false", status});
  }
  return t;
}

CsvTable storage_table(const std::vector<Mechanism>& mechanisms,
                       const std::vector<std::uint32_t>& nrhs, const DeviceGeometry& geometry) {
  CsvTable t{sweep_kind("storage").columns, {}};
  for (Mechanism m : mechanisms) {
    for (std::uint32_t n : nrhs) {
      const StorageBytes s = storage_model(m, n, geometry, make_timing(uses_prac_timing(m)));
      t.add({std::string(to_string(m)), num(n), num(s.cpu()), num(s.dram), num(s.entries)});
    }
  }
  return t;
}

CsvTable dbc_table(const std::vector<std::uint32_t>& aboths, const std::vector<int>& nbo_rs) {
  CsvTable t{sweep_kind("dbc").columns, {}};
  for (bool prac : {false, true}) {
    const TimingParams timing = make_timing(prac);
    for (std::uint32_t a : aboths) {
      for (int n : nbo_rs) {
        const Fraction f = dbc_prac(a, n, timing.tRFM, timing.tRC);
        t.add({num(a), num(n), num(to_ns(timing.tRFM)), num(to_ns(timing.tRC)), num(f.num),
               num(f.den), num(f.value())});
      }
    }
  }
  return t;
}

nlohmann::json ReportBundle::manifest() const {
  nlohmann::json sweeps = nlohmann::json::array();
  for (const BundleEntry& e : entries) {
    sweeps.push_back({{"name", e.name},
                      {"kind", e.kind},
                      {"file", e.name + ".csv"},
                      {"columns", e.table.columns},
                      {"rows", e.table.rows.size()}});
  }
  return {{"schema_version", kSchemaVersion},
          {"generator", "rdlab"},
          {"config_hash", config_hash},
          {"seed", seed},
          {"sweeps", sweeps}};
}

void write_bundle(const ReportBundle& bundle, const std::string& dir) {
  std::set<std::string> names;
  for (const BundleEntry& e : bundle.entries) {
    if (e.name.empty() || e.name.find('/') != std::string::npos) {
      throw ConfigError("bad bundle entry name '" + e.name + "'");
    }
    if (!names.insert(e.name).second) throw ConfigError("duplicate bundle entry '" + e.name + "'");
    if (e.table.columns != sweep_kind(e.kind).columns) {
      throw ConfigError("entry '" + e.name + "' does not match the " + e.kind + " schema");
    }
  }
  fs::create_directories(dir);
  for (const BundleEntry& e : bundle.entries) {
    write_file(fs::path(dir) / (e.name + ".csv"), e.table.to_string());
  }
  write_file(fs::path(dir) / "manifest.json", bundle.manifest().dump(2) + "\n");
}

BundleCheck validate_bundle(const std::string& dir) {
  BundleCheck check;
  auto fail = [&check](std::string what) {
    check.ok = false;
    check.problems.push_back(std::move(what));
  };
  const fs::path mpath = fs::path(dir) / "manifest.json";
  if (!fs::exists(mpath)) {
    fail(mpath.string() + ": missing");
    return check;
  }
  try {
    check.manifest = nlohmann::json::parse(read_file(mpath));
  } catch (const nlohmann::json::exception& e) {
    fail(mpath.string() + ": " + e.what());
    return check;
  }
  const auto& m = check.manifest;
  if (!m.is_object() || !m.contains("schema_version") || m["schema_version"] != kSchemaVersion) {
    fail(mpath.string() + ": schema_version must be " + std::to_string(kSchemaVersion));
    return check;
  }
  if (!m.contains("sweeps") || !m["sweeps"].is_array()) {
    fail(mpath.string() + ": sweeps must be an array");
    return check;
  }
  for (const auto& s : m["sweeps"]) {
    if (!s.is_object() || !s.contains("file") || !s.contains("kind") || !s["file"].is_string() ||
        !s["kind"].is_string()) {
      fail(mpath.string() + ": every sweep needs a file and a kind");
      continue;
    }
    const std::string file = s["file"].get<std::string>();
    const fs::path p = fs::path(dir) / file;
    const SweepKind* kind = nullptr;
    for (const auto& k : sweep_kinds()) {
      if (k.name == s["kind"].get<std::string>()) kind = &k;
    }
    if (!kind) {
      fail(file + ": unknown kind '" + s["kind"].get<std::string>() + "'");
      continue;
    }
    if (!fs::exists(p)) {
      fail(file + ": missing");
      continue;
    }
    try {
      const CsvTable t = parse_csv(read_file(p), file);
      if (t.columns != kind->columns) fail(file + ": header does not match the " + kind->name + " schema");
      if (s.contains("rows") && s["rows"] != t.rows.size()) fail(file + ": row count differs from manifest");
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return check;
}

nlohmann::json stats_document(const RunOutcome& outcome, const std::string& config_hash,
                              std::uint64_t seed,
                              const std::vector<std::pair<std::string, std::string>>& effective) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : effective) cfg[k] = v;
  nlohmann::json j = outcome.to_json();
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["config"] = cfg;
  const bool violated = outcome.shared.violations > 0;
  j["verdict"] = violated ? (outcome.mitigation.claimed_secure ? "violation-in-secure-config"
                                                               : "violation-expected-insecure")
                          : "clean";
  return j;
}

}  // namespace rdlab
