#include "rdlab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rdlab/errors.hpp"

namespace rdlab {

const char* to_string(Source s) {
  switch (s) {
    case Source::Default: return "default";
    case Source::File: return "file";
    case Source::Flag: return "flag";
  }
  return "?";
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '[' && ch != ']') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += f(v[i]);
  }
  return out;
}

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T, class Field>
Key number_key(std::string name, Field field) {
  Key k;
  k.name = name;
  k.get = [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); };
  k.set = [field, name](RunConfig& c, const std::string& v) {
    field(c) = parse_number<T>(name, v);
  };
  return k;
}

template <class Field>
Key double_key(std::string name, Field field) {
  Key k;
  k.name = name;
  k.get = [field](const RunConfig& c) { return fmt_double(field(const_cast<RunConfig&>(c))); };
  k.set = [field, name](RunConfig& c, const std::string& v) {
    field(c) = parse_number<double>(name, v);
  };
  return k;
}

template <class Field>
Key bool_key(std::string name, Field field) {
  Key k;
  k.name = name;
  k.get = [field](const RunConfig& c) {
    return std::string(field(const_cast<RunConfig&>(c)) ? "true" : "false");
  };
  k.set = [field, name](RunConfig& c, const std::string& v) { field(c) = parse_bool(name, v); };
  return k;
}

Key timing_key(const std::string& param) {
  Key k;
  k.name = "timing." + param;
  k.get = [param](const RunConfig& c) -> std::string {
    for (const auto& [key, ns] : c.system.timing_overrides) {
      if (key == param) return fmt_double(ns);
    }
    return "mechanism-default";
  };
  k.set = [param, name = k.name](RunConfig& c, const std::string& v) {
    const double ns = parse_number<double>(name, v);
    auto& o = c.system.timing_overrides;
    for (auto& entry : o) {
      if (entry.first == param) {
        entry.second = ns;
        return;
      }
    }
    o.emplace_back(param, ns);
  };
  return k;
}

#define FIELD(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> v;
    v.push_back(number_key<std::uint64_t>("seed", FIELD(system.seed)));
    v.push_back(number_key<std::uint64_t>("instructions", FIELD(system.instructions)));
    v.push_back({"max_time_ns",
                 [](const RunConfig& c) { return fmt_double(to_ns(c.system.max_time)); },
                 [](RunConfig& c, const std::string& s) {
                   c.system.max_time = from_ns(parse_number<double>("max_time_ns", s));
                 }});
    v.push_back(number_key<int>("geometry.ranks", FIELD(system.geometry.ranks)));
    v.push_back(number_key<int>("geometry.bank_groups", FIELD(system.geometry.bank_groups)));
    v.push_back(number_key<int>("geometry.banks_per_group", FIELD(system.geometry.banks_per_group)));
    v.push_back(number_key<std::int64_t>("geometry.rows_per_bank", FIELD(system.geometry.rows_per_bank)));
    for (const std::string& t : timing_override_keys()) v.push_back(timing_key(t));

    v.push_back({"mitigation.mechanism",
                 [](const RunConfig& c) { return std::string(to_string(c.system.mitigation.mechanism)); },
                 [](RunConfig& c, const std::string& s) {
                   c.system.mitigation.mechanism = parse_mechanism(s);
                 }});
    v.push_back(number_key<std::uint32_t>("mitigation.nrh", FIELD(system.mitigation.nrh)));
    v.push_back(number_key<std::uint32_t>("mitigation.aboth", FIELD(system.mitigation.aboth)));
    v.push_back(number_key<int>("mitigation.nbo_r", FIELD(system.mitigation.nbo_r)));
    v.push_back(number_key<int>("mitigation.nbo_a", FIELD(system.mitigation.nbo_a)));
    v.push_back(number_key<std::uint32_t>("mitigation.rfm_th", FIELD(system.mitigation.rfm_th)));
    v.push_back(number_key<std::uint32_t>("mitigation.chronus_nbo", FIELD(system.mitigation.chronus_nbo)));
    v.push_back(number_key<int>("mitigation.att_capacity", FIELD(system.mitigation.att_capacity)));
    v.push_back(bool_key("mitigation.borrowed_refresh", FIELD(system.mitigation.borrowed_refresh)));
    v.push_back(bool_key("mitigation.inflight_increment", FIELD(system.mitigation.inflight_increment)));
    v.push_back(double_key("mitigation.para.probability", FIELD(system.mitigation.para_probability)));
    v.push_back(number_key<std::uint32_t>("mitigation.graphene.threshold",
                                            FIELD(system.mitigation.graphene_threshold)));
    v.push_back(number_key<std::uint64_t>("mitigation.graphene.entries",
                                            FIELD(system.mitigation.graphene_entries)));
    v.push_back(number_key<std::uint32_t>("mitigation.hydra.row_threshold",
                                            FIELD(system.mitigation.hydra_row_threshold)));
    v.push_back(number_key<std::uint32_t>("mitigation.hydra.group_threshold",
                                            FIELD(system.mitigation.hydra_group_threshold)));
    v.push_back(number_key<int>("mitigation.hydra.groups_per_rank",
                                  FIELD(system.mitigation.hydra_groups_per_rank)));
    v.push_back(number_key<int>("mitigation.hydra.rcc_entries", FIELD(system.mitigation.hydra_rcc_entries)));
    v.push_back(number_key<std::uint32_t>("mitigation.abacus.threshold",
                                            FIELD(system.mitigation.abacus_threshold)));
    v.push_back(number_key<std::uint64_t>("mitigation.abacus.entries",
                                            FIELD(system.mitigation.abacus_entries)));

    v.push_back(number_key<int>("scheduler.cap", FIELD(system.scheduler.cap)));
    v.push_back({"scheduler.queues",
                 [](const RunConfig& c) { return std::to_string(c.system.scheduler.read_queue); },
                 [](RunConfig& c, const std::string& s) {
                   const auto n = parse_number<std::size_t>("scheduler.queues", s);
                   c.system.scheduler.read_queue = n;
                   c.system.scheduler.write_queue = n;
                 }});
    v.push_back({"scheduler.mapping",
                 [](const RunConfig& c) { return std::string(to_string(c.system.scheduler.mapping)); },
                 [](RunConfig& c, const std::string& s) { c.system.scheduler.mapping = parse_mapping(s); }});
    v.push_back(bool_key("refresh.enabled", FIELD(system.refresh.enabled)));
    v.push_back(number_key<int>("refresh.postpone_max", FIELD(system.refresh.postpone_max)));
    v.push_back(bool_key("cache.enabled", FIELD(system.cache.enabled)));
    v.push_back(number_key<std::uint64_t>("cache.size_bytes", FIELD(system.cache.size_bytes)));
    v.push_back(number_key<int>("cache.ways", FIELD(system.cache.ways)));
    v.push_back(number_key<int>("core.window", FIELD(system.core.window)));
    v.push_back(number_key<int>("core.width", FIELD(system.core.width)));
    v.push_back(double_key("energy.act_pre", FIELD(system.energy.act_pre)));
    v.push_back(double_key("energy.rd", FIELD(system.energy.rd)));
    v.push_back(double_key("energy.wr", FIELD(system.energy.wr)));
    v.push_back(double_key("energy.ref", FIELD(system.energy.ref)));
    v.push_back(double_key("energy.rfm", FIELD(system.energy.rfm)));
    v.push_back(double_key("energy.chronus_act_multiplier", FIELD(system.energy.chronus_act_multiplier)));

    v.push_back({"workload.pattern", [](const RunConfig& c) { return c.workload.pattern; },
                 [](RunConfig& c, const std::string& s) { c.workload.pattern = s; }});
    v.push_back(number_key<int>("workload.mixes", FIELD(workload.mixes)));
    v.push_back(number_key<std::size_t>("workload.trace_length", FIELD(workload.trace_length)));
    v.push_back({"workload.traces",
                 [](const RunConfig& c) {
                   return join<std::string>(c.workload.trace_files, [](const std::string& s) { return s; });
                 },
                 [](RunConfig& c, const std::string& s) { c.workload.trace_files = split_list(s); }});
    v.push_back(bool_key("workload.perf_attack", FIELD(workload.perf_attack)));

    v.push_back({"sweep.mechanisms",
                 [](const RunConfig& c) {
                   return join<Mechanism>(c.sweep.mechanisms,
                                          [](const Mechanism& m) { return std::string(to_string(m)); });
                 },
                 [](RunConfig& c, const std::string& s) {
                   c.sweep.mechanisms.clear();
                   for (const auto& name : split_list(s)) c.sweep.mechanisms.push_back(parse_mechanism(name));
                 }});
    v.push_back({"sweep.nrh",
                 [](const RunConfig& c) {
                   return join<std::uint32_t>(c.sweep.nrh,
                                              [](const std::uint32_t& n) { return std::to_string(n); });
                 },
                 [](RunConfig& c, const std::string& s) {
                   c.sweep.nrh.clear();
                   for (const auto& n : split_list(s)) {
                     c.sweep.nrh.push_back(n == "1K" || n == "1k"
                                               ? 1000u
                                               : parse_number<std::uint32_t>("sweep.nrh", n));
                   }
                 }});
    v.push_back(number_key<int>("sweep.threads", FIELD(sweep.threads)));
    v.push_back({"output.dir", [](const RunConfig& c) { return c.output.dir; },
                 [](RunConfig& c, const std::string& s) { c.output.dir = s; }});
    return v;
  }();
  return keys;
}

#undef FIELD

const Key& lookup(const std::string& name) {
  for (const Key& k : registry()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown config key '" + name + "'");
}

void walk(RunConfig& cfg, const YAML::Node& node, const std::string& prefix) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      walk(cfg, kv.second, prefix.empty() ? key : prefix + "." + key);
    }
    return;
  }
  if (prefix.empty()) throw ConfigError("config file must be a key-value tree");
  if (node.IsSequence()) {
    std::string joined;
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].IsScalar()) throw ConfigError("'" + prefix + "': lists may only hold scalars");
      if (i) joined += ',';
      joined += node[i].as<std::string>();
    }
    set_key(cfg, prefix, joined, Source::File);
    return;
  }
  if (node.IsNull()) throw ConfigError("'" + prefix + "' has no value");
  set_key(cfg, prefix, node.as<std::string>(), Source::File);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Key& k : registry()) v.push_back(k.name);
    return v;
  }();
  return names;
}

RunConfig default_run_config() {
  RunConfig c;
  for (const Key& k : registry()) c.provenance[k.name] = Source::Default;
  return c;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value, Source source) {
  lookup(key).set(cfg, value);
  cfg.provenance[key] = source;
}

void apply_yaml(RunConfig& cfg, const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (root.IsNull()) return;
  try {
    walk(cfg, root, "");
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_yaml(cfg, ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key=value");
  }
  set_key(cfg, assignment.substr(0, eq), assignment.substr(eq + 1), Source::Flag);
}

std::vector<std::pair<std::string, std::string>> RunConfig::effective() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : registry()) out.emplace_back(k.name, k.get(*this));
  return out;
}

std::string RunConfig::explain() const {
  std::size_t width = 0;
  for (const Key& k : registry()) width = std::max(width, k.name.size());
  std::string out;
  for (const auto& [key, value] : effective()) {
    auto it = provenance.find(key);
    const Source s = it == provenance.end() ? Source::Default : it->second;
    out += key + std::string(width + 2 - key.size(), ' ') + value + "  (" + to_string(s) + ")\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash() const {
  std::string canon;
  for (const auto& [key, value] : effective()) canon += key + "=" + value + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

void RunConfig::validate() const {
  system.geometry.validate();
  apply_overrides(make_timing(false), system.timing_overrides);
  system.mitigation.validate();
  system.scheduler.validate();
  system.cache.validate();
  system.energy.validate();
  workload.validate();
  if (system.instructions == 0) throw ConfigError("instructions must be >= 1");
  if (system.max_time <= 0) throw ConfigError("max_time_ns must be positive");
  if (system.core.window < 1 || system.core.width < 1) throw ConfigError("core window and width must be >= 1");
  if (sweep.nrh.empty()) throw ConfigError("sweep.nrh must list at least one value");
  for (std::uint32_t n : sweep.nrh) {
    if (n < 1) throw ConfigError("sweep.nrh values must be >= 1");
  }
  if (sweep.threads < 0) throw ConfigError("sweep.threads must be >= 0");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

}  // namespace rdlab
