#include "hpa/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace hpa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

EventCounts draw(const double (&p)[4], std::uint64_t n, std::mt19937_64& rng) {
  EventCounts c;
  c.total = n;
  std::uint64_t left = n;
  double mass = 1.0;
  std::uint64_t* slots[4] = {&c.n00, &c.n0c, &c.nc0, &c.ncc};
  for (int k = 0; k < 3; ++k) {
    if (left == 0 || mass <= 0.0) break;
    const double q = std::clamp(p[k] / mass, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> binom(left, q);
    *slots[k] = binom(rng);
    left -= *slots[k];
    mass -= p[k];
  }
  c.ncc += left;
  return c;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

struct Estimate {
  double f = 0.0;
  double f_sep = 0.0;
  double d = 0.0;
  double margin = 0.0;
};

ProbabilitySet to_probability_set(std::span<const ScanCounts> scan, const EventCounts& zero, double p2a, double p2b) {
  ProbabilitySet ps;
  ps.at_zero = empirical_table(zero);
  ps.p2a = p2a;
  ps.p2b = p2b;
  for (const auto& s : scan) {
    DisplacementSetting setting;
    setting.phase_alice = s.relative_phase;
    ps.phase_scan.push_back({s.relative_phase, empirical_table(s.counts, setting)});
  }
  return ps;
}

Estimate estimate(const ProbabilitySet& ps, const CoherenceModel& model) {
  Estimate e;
  e.d = extract_coherence(ps, model).d;
  e.f = e.d + 0.5 * (ps.at_zero.p0c + ps.at_zero.pc0);
  e.f_sep = separable_bound(ps);
  e.margin = e.f_sep > 0.0 ? (e.f - e.f_sep) / e.f_sep : 0.0;
  return e;
}

void frequencies(const EventCounts& c, double (&p)[4]) {
  const double n = static_cast<double>(c.total);
  p[0] = static_cast<double>(c.n00) / n;
  p[1] = static_cast<double>(c.n0c) / n;
  p[2] = static_cast<double>(c.nc0) / n;
  p[3] = static_cast<double>(c.ncc) / n;
}

double half_width(const std::vector<double>& v) { return 0.5 * (percentile(v, 0.84) - percentile(v, 0.16)); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

EventCounts sample_events(const JointClickTable& table, std::uint64_t n, std::uint64_t seed) {
  const double p[4] = {table.p00, table.p0c, table.pc0, table.pcc};
  for (const double x : p) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw InvalidArgument("click table entries must lie in [0, 1]");
  }
  if (std::abs(table.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("click table is not normalized (sum = " + std::to_string(table.sum()) + ")");
  }
  std::mt19937_64 rng(seed);
  EventCounts c = draw(p, n, rng);
  c.seed = seed;
  return c;
}

CountUncertainties estimate_uncertainties(const EventCounts& counts) {
  if (counts.total == 0) throw InvalidArgument("uncertainties need at least one event");
  double p[4];
  frequencies(counts, p);
  const double n = static_cast<double>(counts.total);
  auto se = [n](double q) { return std::sqrt(q * (1.0 - q) / n); };
  return {se(p[0]), se(p[1]), se(p[2]), se(p[3])};
}

JointClickTable empirical_table(const EventCounts& counts, const DisplacementSetting& setting) {
  if (counts.total == 0) throw InvalidArgument("empirical table needs at least one event");
  double p[4];
  frequencies(counts, p);
  JointClickTable t;
  t.p00 = p[0];
  t.p0c = p[1];
  t.pc0 = p[2];
  t.pcc = p[3];
  t.setting = setting;
  return t;
}

BootstrapResult bootstrap_fidelity(std::span<const ScanCounts> scan, const EventCounts& zero, const CoherenceModel& model,
                                   double p2a, double p2b, const BootstrapOptions& options) {
  if (options.resamples < 2) throw InvalidArgument("bootstrap needs at least two resamples");
  const ProbabilitySet observed = to_probability_set(scan, zero, p2a, p2b);
  const Estimate central = estimate(observed, model);

  double p_zero[4];
  frequencies(zero, p_zero);
  std::vector<std::array<double, 4>> p_scan(scan.size());
  for (std::size_t k = 0; k < scan.size(); ++k) {
    double p[4];
    frequencies(scan[k].counts, p);
    std::copy(std::begin(p), std::end(p), p_scan[k].begin());
  }

  const auto n = static_cast<std::size_t>(options.resamples);
  std::vector<Estimate> full(n);
  std::vector<double> zero_only(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<ScanCounts> resampled(scan.begin(), scan.end());
    for (std::size_t r = begin; r < end; ++r) {
      std::mt19937_64 rng(derive_seed(options.seed, r));
      const EventCounts z = draw(p_zero, zero.total, rng);
      for (std::size_t k = 0; k < scan.size(); ++k) {
        double p[4];
        std::copy(p_scan[k].begin(), p_scan[k].end(), std::begin(p));
        resampled[k].counts = draw(p, scan[k].counts.total, rng);
      }
      full[r] = estimate(to_probability_set(resampled, z, p2a, p2b), model);
      const JointClickTable tz = empirical_table(z);
      zero_only[r] = central.d + 0.5 * (tz.p0c + tz.pc0);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  std::vector<double> fs(n), fseps(n), ds(n), margins(n);
  for (std::size_t r = 0; r < n; ++r) {
    fs[r] = full[r].f;
    fseps[r] = full[r].f_sep;
    ds[r] = full[r].d;
    margins[r] = full[r].margin;
  }

  BootstrapResult out;
  FidelityReport& rep = out.report;
  rep.f = central.f;
  rep.f_sep = central.f_sep;
  rep.d = central.d;
  rep.margin = central.margin;
  rep.sigma_f = half_width(fs);
  rep.sigma_fsep = half_width(fseps);
  rep.sigma_d = half_width(ds);
  rep.sigma_margin = half_width(margins);
  rep.poor_visibility = extract_coherence(observed, model).poor_visibility;
  out.f_interval = {percentile(fs, 0.16), percentile(fs, 0.84)};
  out.d_interval = {percentile(ds, 0.16), percentile(ds, 0.84)};
  out.sigma_f_zero_only = half_width(zero_only);
  return out;
}

FidelityReport propagate_to_fidelity(std::span<const ScanCounts> scan, const EventCounts& zero,
                                     const CoherenceModel& model, double p2a, double p2b,
                                     const BootstrapOptions& options) {
  return bootstrap_fidelity(scan, zero, model, p2a, p2b, options).report;
}

}  // namespace hpa
