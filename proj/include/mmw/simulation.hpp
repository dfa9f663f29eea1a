#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmw/deployment.hpp"
#include "mmw/kpi.hpp"
#include "mmw/scenario.hpp"
#include "mmw/scheduler.hpp"

namespace mmw {

/// A run aborted inside the TTI loop; the message carries tti/cell/ue.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// When set, per-run CSV traces are written here: <label>_allocation.csv
  /// (tti, cell_id, rb, ue_id, bits), <label>_channel.csv (tti, ue_id, rb,
  /// serving-link Frobenius norm) and the layout dump.
  std::optional<std::filesystem::path> trace_dir;
  std::string trace_label = "run";
  /// Called after every cell's allocation has its delivered bits filled in.
  std::function<void(int tti, int cell_id, const Allocation&)> on_allocation;
};

struct RunResult {
  KpiRecord kpi;
  ThroughputLedger ledger;         // counted UEs only
  std::vector<int> counted_ues;    // ue ids behind ledger.bits, ascending
  std::vector<UeState> ues;
  SiteLayout layout;
};

/// Runs one scenario end to end. Per TTI, in this order: channel update,
/// scheduling on the CSI reports that are `feedback_delay_tti` old, link
/// evaluation (delivered bits on the scheduled RBs and fresh CSI reports
/// against this TTI's interference), moving-average update, ledger. Fully
/// determined by the config, including its seed.
RunResult run_simulation_detailed(const ScenarioConfig& cfg, const RunOptions& options = {});

KpiRecord run_simulation(const ScenarioConfig& cfg, const RunOptions& options = {});

}  // namespace mmw
