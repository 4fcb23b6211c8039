#include "rdlab/analytic.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace rdlab {

namespace {

int resolve_nbo_a(int nbo_r, int nbo_a) { return nbo_a <= 0 ? nbo_r : nbo_a; }

void check_counts(std::int64_t a, std::int64_t b, std::int64_t c) {
  if (a < 1 || b < 1 || c < 1) throw std::invalid_argument("wave parameters must be >= 1");
}

// Rounds survived by the last row, or -1 when even the pre-hammer does not fit.
std::int64_t budgeted_rounds(std::int64_t r1, std::int64_t period, std::int64_t per_period,
                             std::int64_t pre, const TimingParams& t, bool charge_pre) {
  const std::int64_t t0 = charge_pre ? r1 * pre * t.tRC : 0;
  if (t0 > t.tREFW) return -1;
  std::int64_t s = 0;
  std::int64_t c = 0;
  for (;;) {
    const std::int64_t alive = r1 - per_period * (s / period);
    if (alive <= 0) return c;
    const std::int64_t s2 = s + alive;
    if (t0 + s2 * t.tRC + per_period * (s2 / period) * t.tRFM > t.tREFW) return c;
    ++c;
    s = s2;
  }
}

std::vector<std::int64_t> rounds(std::int64_t r1, std::int64_t period, std::int64_t per_period) {
  std::vector<std::int64_t> out;
  std::int64_t s = 0;
  for (;;) {
    const std::int64_t alive = std::max<std::int64_t>(0, r1 - per_period * (s / period));
    out.push_back(alive);
    if (alive == 0) return out;
    s += alive;
  }
}

Hammer search(std::int64_t period, std::int64_t per_period, std::int64_t pre, std::int64_t extra,
              const TimingParams& t, bool charge_pre) {
  Hammer best;
  const std::int64_t limit = t.tREFW / t.tRC;
  for (std::int64_t r1 = 1; r1 <= limit; ++r1) {
    const std::int64_t c = budgeted_rounds(r1, period, per_period, pre, t, charge_pre);
    if (c < 0) break;
    const std::int64_t h = pre + c + (c > 0 ? extra : 0);
    if (h > best.max_hammer) {
      best.max_hammer = static_cast<std::uint32_t>(h);
      best.r1 = r1;
    }
    if (charge_pre && (r1 + 1) * (pre + 1) * t.tRC > t.tREFW) break;
  }
  return best;
}

}  // namespace

int a_normal(const TimingParams& timing) {
  return static_cast<int>(timing.tABOact / timing.tRC);
}

std::vector<std::int64_t> prfm_rounds(std::uint32_t rfm_th, std::int64_t r1) {
  check_counts(rfm_th, r1, 1);
  return rounds(r1, rfm_th, 1);
}

std::vector<std::int64_t> prac_rounds(std::uint32_t aboth, int nbo_r, int nbo_a, std::int64_t r1,
                                      const TimingParams& timing) {
  nbo_a = resolve_nbo_a(nbo_r, nbo_a);
  check_counts(aboth, nbo_r, r1);
  return rounds(r1, nbo_a + a_normal(timing), nbo_r);
}

std::uint32_t prfm_max_hammer(std::uint32_t rfm_th, std::int64_t r1, const TimingParams& timing,
                              const WaveOptions&) {
  check_counts(rfm_th, r1, 1);
  return static_cast<std::uint32_t>(
      std::max<std::int64_t>(0, budgeted_rounds(r1, rfm_th, 1, 0, timing, false)));
}

std::uint32_t prac_max_hammer(std::uint32_t aboth, int nbo_r, int nbo_a, std::int64_t r1,
                              const TimingParams& timing, const WaveOptions& opts) {
  nbo_a = resolve_nbo_a(nbo_r, nbo_a);
  check_counts(aboth, nbo_r, r1);
  const std::int64_t pre = aboth - 1;
  const std::int64_t c =
      budgeted_rounds(r1, nbo_a + a_normal(timing), nbo_r, pre, timing, opts.charge_prehammer);
  if (c < 0) return 0;
  const std::int64_t extra = opts.inflight_increment && c > 0 ? nbo_r - 1 : 0;
  return static_cast<std::uint32_t>(pre + c + extra);
}

Hammer prfm_worst(std::uint32_t rfm_th, const TimingParams& timing, const WaveOptions&) {
  check_counts(rfm_th, 1, 1);
  return search(rfm_th, 1, 0, 0, timing, false);
}

Hammer prac_worst(std::uint32_t aboth, int nbo_r, int nbo_a, const TimingParams& timing,
                  const WaveOptions& opts) {
  nbo_a = resolve_nbo_a(nbo_r, nbo_a);
  check_counts(aboth, nbo_r, nbo_a);
  return search(nbo_a + a_normal(timing), nbo_r, aboth - 1,
                opts.inflight_increment ? nbo_r - 1 : 0, timing, opts.charge_prehammer);
}

std::uint32_t chronus_bound(std::uint32_t nbo, Ps trc, Ps taboact) {
  if (nbo < 1 || trc <= 0) throw std::invalid_argument("chronus_bound needs N_BO >= 1, tRC > 0");
  return nbo + static_cast<std::uint32_t>(taboact / trc);
}

int att_min_size(Ps trc, Ps taboact) {
  if (trc <= 0) throw std::invalid_argument("tRC must be positive");
  return static_cast<int>(taboact / trc) + 1;
}

Fraction dbc_prac(std::uint32_t aboth, int nbo_r, Ps trfm, Ps trc) {
  if (aboth < 1 || nbo_r < 1 || trfm <= 0 || trc <= 0)
    throw std::invalid_argument("dbc parameters must be positive");
  Fraction f{nbo_r * trfm, nbo_r * trfm + static_cast<std::int64_t>(aboth) * trc};
  const std::int64_t g = std::gcd(f.num, f.den);
  f.num /= g;
  f.den /= g;
  return f;
}

DbcChain dbc_chain(Ps rfm_time, Ps window, std::uint32_t aboth, int nbo_r, Ps trfm, Ps trc) {
  if (window <= 0) throw std::invalid_argument("window must be positive");
  DbcChain c;
  const double T = static_cast<double>(window);
  const double backoff = static_cast<double>(nbo_r) * static_cast<double>(trfm);
  c.measured = static_cast<double>(rfm_time) / T;
  c.bound = dbc_prac(aboth, nbo_r, trfm, trc).value();
  c.backoffs = T * c.measured / backoff;
  c.refresh_time = c.backoffs * backoff;
  c.remaining_time = T - c.refresh_time;
  c.trigger_time = c.backoffs * static_cast<double>(aboth) * static_cast<double>(trc);
  const double eps = 1e-9 * T;
  c.feasible = c.trigger_time <= c.remaining_time + eps;
  c.passes = c.measured <= c.bound + 1e-12;
  return c;
}

Hammer worst_case(const MitigationConfig& cfg, const WaveOptions& opts) {
  const TimingParams t = make_timing(uses_prac_timing(cfg.mechanism));
  switch (cfg.mechanism) {
    case Mechanism::PRFM:
      return prfm_worst(cfg.rfm_th, t, opts);
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
    case Mechanism::ChronusPB:
      return prac_worst(cfg.aboth, cfg.nbo_r, cfg.effective_nbo_a(), t, opts);
    case Mechanism::Chronus:
      return {chronus_bound(cfg.chronus_nbo, t.tRC, t.tABOact), 0};
    default:
      throw std::invalid_argument("no wave analysis for " + std::string(to_string(cfg.mechanism)));
  }
}

namespace {

std::optional<SecureConfig> compute_secure(Mechanism m, std::uint32_t nrh, int prac_n,
                                           const WaveOptions& opts) {
  const TimingParams t = make_timing(uses_prac_timing(m));
  SecureConfig sc;
  sc.config.mechanism = m;
  sc.config.nrh = nrh;
  sc.config.inflight_increment = opts.inflight_increment;
  switch (m) {
    case Mechanism::PRFM: {
      // Largest threshold whose worst case stays below nrh.
      std::uint32_t lo = 0, hi = nrh;
      Hammer best{};
      while (lo < hi) {
        const std::uint32_t mid = lo + (hi - lo + 1) / 2;
        const Hammer h = prfm_worst(mid, t, opts);
        if (h.max_hammer < nrh) {
          lo = mid;
          best = h;
        } else {
          hi = mid - 1;
        }
      }
      if (lo == 0) return std::nullopt;
      sc.config.rfm_th = lo;
      sc.worst = best.max_hammer;
      sc.worst_r1 = best.r1;
      return sc;
    }
    case Mechanism::PRAC:
    case Mechanism::PRAC_PRFM:
    case Mechanism::ChronusPB: {
      const int n = m == Mechanism::ChronusPB ? 4 : prac_n;
      std::uint32_t lo = 0, hi = nrh;
      Hammer best{};
      while (lo < hi) {
        const std::uint32_t mid = lo + (hi - lo + 1) / 2;
        const Hammer h = prac_worst(mid, n, n, t, opts);
        if (h.max_hammer < nrh) {
          lo = mid;
          best = h;
        } else {
          hi = mid - 1;
        }
      }
      if (lo == 0) return std::nullopt;
      sc.config.aboth = lo;
      sc.config.nbo_r = n;
      sc.config.nbo_a = n;
      if (m == Mechanism::PRAC_PRFM) sc.config.rfm_th = 75;
      sc.worst = best.max_hammer;
      sc.worst_r1 = best.r1;
      return sc;
    }
    case Mechanism::Chronus: {
      const std::int64_t nbo = static_cast<std::int64_t>(nrh) - a_normal(t) - 1;
      if (nbo < 1) return std::nullopt;
      // The 8-bit counter must still hold N_BO plus the window ACTs.
      sc.config.chronus_nbo = static_cast<std::uint32_t>(std::min<std::int64_t>(nbo, 256 - a_normal(t)));
      sc.config.nbo_r = 1;
      sc.config.nbo_a = 0;
      sc.config.att_capacity = std::max(4, att_min_size(t.tRC, t.tABOact));
      sc.worst = chronus_bound(sc.config.chronus_nbo, t.tRC, t.tABOact);
      return sc;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<SecureConfig> find_secure_config(Mechanism mechanism, std::uint32_t nrh, int prac_n,
                                               const WaveOptions& opts) {
  using Key = std::tuple<int, std::uint32_t, int, bool, bool>;
  static std::mutex mu;
  static std::map<Key, std::optional<SecureConfig>> memo;
  const Key key{static_cast<int>(mechanism), nrh, prac_n, opts.charge_prehammer,
                opts.inflight_increment};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  auto r = compute_secure(mechanism, nrh, prac_n, opts);
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, r);
  return r;
}

std::vector<SweepRow> sweep_prfm(const std::vector<std::uint32_t>& thresholds,
                                 const WaveOptions& opts) {
  const TimingParams t = make_timing(false);
  std::vector<SweepRow> out;
  for (std::uint32_t th : thresholds) {
    const Hammer h = prfm_worst(th, t, opts);
    SweepRow r;
    r.mechanism = "prfm";
    r.rfm_th = th;
    r.max_hammer = h.max_hammer;
    r.worst_r1 = h.r1;
    r.secure_min_nrh = h.max_hammer + 1;
    out.push_back(r);
  }
  return out;
}

std::vector<SweepRow> sweep_prac(const std::vector<std::uint32_t>& aboths,
                                 const std::vector<int>& nbo_rs, int nbo_a,
                                 const WaveOptions& opts) {
  const TimingParams t = make_timing(true);
  std::vector<SweepRow> out;
  for (int nbor : nbo_rs) {
    for (std::uint32_t a : aboths) {
      const int na = resolve_nbo_a(nbor, nbo_a);
      const Hammer h = prac_worst(a, nbor, na, t, opts);
      SweepRow r;
      r.mechanism = "prac";
      r.aboth = a;
      r.nbo_r = nbor;
      r.nbo_a = na;
      r.max_hammer = h.max_hammer;
      r.worst_r1 = h.r1;
      r.secure_min_nrh = h.max_hammer + 1;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace rdlab
