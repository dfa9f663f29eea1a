#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

/// Jain's index of an all-zero vector is 0/0; reported separately from
/// ordinary argument errors.
class DegenerateFairnessError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ThroughputLedger {
  std::vector<double> bits;  // total delivered per counted UE
  double duration = 0.0;     // s
  double bandwidth = 0.0;    // Hz

  std::size_t n() const { return bits.size(); }
  /// Per-UE throughput in bit/s.
  std::vector<double> throughputs() const;
};

/// Mean per-UE throughput, bit/s.
double average_ue_throughput(const ThroughputLedger& ledger);

/// Aggregate throughput over the bandwidth, bit/s/Hz.
double spectral_efficiency(const ThroughputLedger& ledger);

/// (sum T)^2 / (n sum T^2), in [1/n, 1].
double jain_fairness(const ThroughputLedger& ledger);
double jain_fairness(const std::vector<double>& values);

struct KpiRecord {
  SchedulerKind scheduler = SchedulerKind::RR;
  Polarization rx_polarization = Polarization::LPOL;
  double velocity = 0.0;  // km/h
  std::uint64_t seed = 0;
  double avg_ue_throughput = 0.0;    // bit/s
  double spectral_efficiency = 0.0;  // bit/s/Hz
  double fairness_index = 0.0;
  std::size_t n_ues = 0;   // population behind the three indicators
  double bandwidth = 0.0;  // Hz

  bool operator==(const KpiRecord&) const = default;
};

}  // namespace mmw
