#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

struct RbGrid {
  int n_rb = 50;
  double rb_bandwidth = kRbBandwidth;

  static RbGrid for_bandwidth(double bandwidth_hz);
};

/// Priority family P = T^alpha / R^beta (T throughput, R user data).
/// 0^0 is 1, and R = 0 with a non-zero beta yields 0: an RB that carries no
/// data earns no priority. Throws std::invalid_argument for T <= 0.
/// alpha = 0, beta = 1 is the round-robin member; alpha = beta = -1 gives the
/// proportional-fair metric R / T.
double priority(double throughput, double rate, double alpha, double beta);

/// Per-cell scheduler memory. Index k follows the cell's UE list.
struct SchedulerState {
  std::vector<double> avg_throughput;  // bits/TTI, moving average
  std::size_t rr_cursor = 0;
  double alpha = 0.0;
  double beta = 1.0;
  double tc = 20.0;  // TTIs

  static SchedulerState make(SchedulerKind kind, std::size_t n_ues, double initial_throughput, double tc);
};

/// Bits each UE can carry on each RB: rates[k * n_rb + rb].
struct RateTable {
  std::size_t n_ues = 0;
  int n_rb = 0;
  std::vector<double> bits;

  double at(std::size_t ue, int rb) const { return bits[ue * n_rb + rb]; }
};

struct RbGrant {
  int ue = -1;       // id from the scheduled list
  double bits = 0.0;
};

/// One TTI of one cell: grants[rb].
struct Allocation {
  std::vector<RbGrant> grants;

  /// RBs granted to each position of `ues`.
  std::vector<int> rb_counts(std::span<const int> ues) const;
  /// Bits granted to each position of `ues`.
  std::vector<double> bits_per_ue(std::span<const int> ues) const;
};

/// Cyclic RB-granular round robin from the state's cursor. The cursor then
/// advances by n_rb modulo the UE count. Channel quality only sets the bits.
Allocation schedule_rr(std::span<const int> ues, const RbGrid& grid, const RateTable& rates, SchedulerState& state);

/// Each RB to argmax_k rate[k][rb] / T_k; ties to the lowest position (the
/// caller keeps `ues` sorted by id).
Allocation schedule_pf(std::span<const int> ues, const RbGrid& grid, const RateTable& rates,
                       const SchedulerState& state);

/// T_k <- (1 - 1/tc) T_k + (1/tc) granted_k for every UE of the cell.
void update_average_throughput(SchedulerState& state, std::span<const double> granted_bits, double tc);

}  // namespace mmw
