#pragma once

// Finite-statistics emulation: multinomial event sampling from exact click
// tables and seeded bootstrap propagation to the fidelity report.

#include <cstdint>
#include <span>
#include <vector>

#include "hpa/estimators.hpp"

namespace hpa {

struct EventCounts {
  std::uint64_t n00 = 0;
  std::uint64_t n0c = 0;
  std::uint64_t nc0 = 0;
  std::uint64_t ncc = 0;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

/// Stateless seed derivation (splitmix64 of seed and stream), so that
/// per-resample streams do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Multinomial draw of n events. Throws InvalidArgument when the table is not
/// normalized within 1e-9.
EventCounts sample_events(const JointClickTable& table, std::uint64_t n, std::uint64_t seed);

struct CountUncertainties {
  double s00 = 0.0;
  double s0c = 0.0;
  double sc0 = 0.0;
  double scc = 0.0;
};

/// Binomial standard errors sqrt(p (1 - p) / n) per entry.
CountUncertainties estimate_uncertainties(const EventCounts& counts);

JointClickTable empirical_table(const EventCounts& counts, const DisplacementSetting& setting = {});

struct ScanCounts {
  double relative_phase = 0.0;
  EventCounts counts{};
};

struct BootstrapOptions {
  std::uint64_t resamples = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BootstrapResult {
  FidelityReport report;  // central values from the observed counts, sigmas from the bootstrap
  Interval f_interval;    // 16th..84th percentile
  Interval d_interval;
  /// sigma of F when only the zero-displacement counts are resampled.
  double sigma_f_zero_only = 0.0;
};

/// Parametric bootstrap: every resample redraws each count vector from its
/// empirical frequencies with a seed derived from (options.seed, index).
/// Sigmas are half the 16..84 percentile width.
BootstrapResult bootstrap_fidelity(std::span<const ScanCounts> scan, const EventCounts& zero, const CoherenceModel& model,
                                   double p2a, double p2b, const BootstrapOptions& options);

FidelityReport propagate_to_fidelity(std::span<const ScanCounts> scan, const EventCounts& zero,
                                     const CoherenceModel& model, double p2a, double p2b,
                                     const BootstrapOptions& options);

}  // namespace hpa
