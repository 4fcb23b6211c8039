#include "rdlab/trace.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "rdlab/errors.hpp"

namespace rdlab {

const char* to_string(Intensity i) {
  switch (i) {
    case Intensity::H: return "H";
    case Intensity::M: return "M";
    case Intensity::L: return "L";
    case Intensity::Attack: return "attack";
    case Intensity::Unknown: return "unknown";
  }
  return "unknown";
}

Intensity parse_intensity(const std::string& s) {
  if (s == "H" || s == "h") return Intensity::H;
  if (s == "M" || s == "m") return Intensity::M;
  if (s == "L" || s == "l") return Intensity::L;
  throw ConfigError("unknown intensity class: " + s);
}

std::uint64_t Trace::instructions() const {
  std::uint64_t n = 0;
  for (const auto& e : entries) n += e.bubbles + 1ull;
  return n;
}

Trace parse_trace(std::istream& in, const std::string& name) {
  Trace t;
  t.name = name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a)) continue;
    if (a[0] == '#') continue;
    if (!(ls >> b)) throw ParseError(name, lineno, "expected `<bubbles> <hex-address> [W]`");
    ls >> c >> extra;
    if (!extra.empty()) throw ParseError(name, lineno, "trailing tokens");
    TraceEntry e;
    try {
      std::size_t pos = 0;
      if (a[0] == '-') throw std::invalid_argument("negative");
      const unsigned long long bub = std::stoull(a, &pos, 10);
      if (pos != a.size() || bub > 0xffffffffull) throw std::invalid_argument("bubbles");
      e.bubbles = static_cast<std::uint32_t>(bub);
      std::string hex = b;
      if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex = hex.substr(2);
      if (hex.empty() || hex[0] == '-' || hex[0] == '+') throw std::invalid_argument("address");
      e.address = std::stoull(hex, &pos, 16);
      if (pos != hex.size()) throw std::invalid_argument("address");
    } catch (const std::logic_error&) {
      throw ParseError(name, lineno, "malformed entry `" + line + "`");
    }
    if (!c.empty()) {
      if (c != "W" && c != "w") throw ParseError(name, lineno, "third field must be W");
      e.is_write = true;
    }
    t.entries.push_back(e);
  }
  if (t.entries.empty()) throw ParseError(name, lineno, "trace is empty");
  return t;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace " + path);
  return parse_trace(in, path);
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace " + path);
  out << "# " << trace.name << " " << to_string(trace.intensity) << "\n";
  for (const auto& e : trace.entries) {
    out << e.bubbles << " 0x" << std::hex << e.address << std::dec << (e.is_write ? " W" : "")
        << "\n";
  }
}

namespace {

struct Profile {
  double mean_bubbles;
  double random;
  double stream;
  double write;
};

Profile profile_for(Intensity i) {
  switch (i) {
    case Intensity::H: return {14.0, 0.60, 0.35, 0.25};
    case Intensity::M: return {60.0, 0.14, 0.20, 0.25};
    case Intensity::L: return {200.0, 0.02, 0.05, 0.20};
    default: throw ConfigError("synthetic traces need an H, M or L class");
  }
}

}  // namespace

Trace gen_synthetic(Intensity intensity, std::size_t length, std::uint64_t seed,
                    std::uint64_t capacity_bytes) {
  if (length < 1) throw ConfigError("trace length must be >= 1");
  const Profile p = profile_for(intensity);
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(intensity));
  std::geometric_distribution<std::uint32_t> bubbles(1.0 / (p.mean_bubbles + 1.0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::uint64_t lines = capacity_bytes / 64;
  std::uniform_int_distribution<std::uint64_t> any_line(0, lines - 1);
  // Small per-trace working set that lives in the LLC.
  const std::uint64_t hot_lines = 512;
  const std::uint64_t hot_base = any_line(rng) % (lines - hot_lines);
  std::uniform_int_distribution<std::uint64_t> hot(0, hot_lines - 1);
  std::uint64_t stream = any_line(rng);

  Trace t;
  t.name = std::string("synthetic-") + to_string(intensity) + "-" + std::to_string(seed);
  t.intensity = intensity;
  t.entries.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    TraceEntry e;
    e.bubbles = bubbles(rng);
    const double r = u(rng);
    std::uint64_t line;
    if (r < p.random) {
      line = any_line(rng);
    } else if (r < p.random + p.stream) {
      stream = (stream + 1) % lines;
      if (u(rng) < 0.002) stream = any_line(rng);
      line = stream;
    } else {
      line = hot_base + hot(rng);
    }
    e.address = line * 64;
    e.is_write = u(rng) < p.write;
    t.entries.push_back(e);
  }
  return t;
}

Trace gen_perf_attack(const AddressMapper& mapper, int rows, int banks, std::size_t length) {
  const DeviceGeometry& g = mapper.geometry();
  if (rows < 1 || banks < 1 || banks > g.banks_per_rank() || 1000 + 8 * rows > g.rows_per_bank)
    throw ConfigError("perf attack needs 1..rows rows and 1..banks_per_rank banks");
  Trace t;
  t.name = "perf-attack-" + std::to_string(rows) + "x" + std::to_string(banks);
  t.intensity = Intensity::Attack;
  t.bypass_cache = true;
  std::vector<std::uint64_t> loop;
  for (int r = 0; r < rows; ++r) {
    for (int b = 0; b < banks; ++b) {
      DecodedAddress d;
      const BankAddress ba = BankAddress::from_flat(g, b);
      d.rank = ba.rank;
      d.bank_group = ba.bank_group;
      d.bank = ba.bank;
      d.row = 1000 + 8 * r;
      loop.push_back(mapper.encode(d));
    }
  }
  for (std::size_t i = 0; i < length; ++i) t.entries.push_back({0, loop[i % loop.size()], false});
  return t;
}

const std::vector<std::string>& mix_patterns() {
  static const std::vector<std::string> p = {"HHHH", "MMMM", "LLLL", "HHMM", "MMLL", "LLHH"};
  return p;
}

std::vector<WorkloadMix> workload_mixes(const std::string& pattern, int count) {
  if (pattern.size() != 4) throw ConfigError("mix pattern must have four classes: " + pattern);
  for (char c : pattern) parse_intensity(std::string(1, c));
  std::vector<WorkloadMix> out;
  for (int s = 0; s < count; ++s) out.push_back({pattern + "-" + std::to_string(s), pattern,
                                                 static_cast<std::uint64_t>(s)});
  return out;
}

std::vector<Trace> build_mix(const WorkloadMix& mix, std::size_t length,
                             std::uint64_t capacity_bytes) {
  std::vector<Trace> out;
  for (std::size_t c = 0; c < mix.pattern.size(); ++c) {
    out.push_back(gen_synthetic(parse_intensity(std::string(1, mix.pattern[c])), length,
                                mix.seed * 16 + c, capacity_bytes));
  }
  return out;
}

}  // namespace rdlab
