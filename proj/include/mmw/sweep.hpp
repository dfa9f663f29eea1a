#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mmw/kpi.hpp"
#include "mmw/scenario.hpp"
#include "mmw/simulation.hpp"

namespace mmw {

inline constexpr const char* kToolVersion = "1.0.0";

struct SweepAxes {
  std::vector<double> velocities{0, 20, 40, 60, 80, 100, 120};
  std::vector<Polarization> polarizations{Polarization::LPOL, Polarization::XPOL};
  std::vector<SchedulerKind> schedulers{SchedulerKind::RR, SchedulerKind::PF};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

struct SweepFailure {
  SchedulerKind scheduler;
  Polarization rx_polarization;
  double velocity;
  std::uint64_t seed;
  std::string error;
};

struct ResultsTable {
  std::vector<KpiRecord> records;  // sorted by (scheduler, polarization, velocity, seed)
  std::vector<SweepFailure> failures;
  std::string tool_version = kToolVersion;
  std::string config_hash;  // of the base scenario, hex

  bool complete() const { return failures.empty(); }
};

/// FNV-1a over the serialized scenario, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

struct SweepOptions {
  int parallelism = 1;
  RunOptions run;  // trace_label is replaced per point
  /// Called from worker threads as points finish (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// One run per expanded point. Each point keeps its own axis seed, so every
/// (polarization, scheduler, velocity) shares random numbers at a given seed.
/// Failed points are recorded, not thrown. The table does not depend on the
/// worker count or completion order.
ResultsTable run_sweep(const ScenarioConfig& base, const SweepAxes& axes, int parallelism = 1);
ResultsTable run_sweep(const ScenarioConfig& base, const SweepAxes& axes, const SweepOptions& options);

/// Header plus one row per record, 6 significant digits, LF endings.
std::string format_csv(const ResultsTable& table);

/// Writes format_csv to `path`; throws std::runtime_error if it cannot.
void emit_csv(const ResultsTable& table, const std::filesystem::path& path);

/// Metadata sidecar (version, config hash, sweep axes, counts, failures).
void emit_metadata(const ResultsTable& table, const ScenarioConfig& base, const SweepAxes& axes,
                   const std::filesystem::path& path);

/// Seed-mean of each (scheduler, polarization, velocity) group, in table order.
/// The `seed` field of a mean holds the number of seeds behind it.
std::vector<KpiRecord> seed_means(const ResultsTable& table);

}  // namespace mmw
