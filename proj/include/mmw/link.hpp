#pragma once

#include <span>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

using LayerSinr = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAntennas, 1>;

struct Precoder {
  int rank = 1;
  int base = 0;                 // index into Codebook::bases
  std::array<int, 4> columns{}; // first `rank` entries used
  CMatrix matrix;               // n_tx x rank, orthonormal columns
};

/// DFT-derived codebook. Every precoder is a column subset of one of the
/// phase-rotated DFT bases diag(exp(j 2 pi n k / (N O))) F_N, so a search
/// can evaluate a whole base with one projection.
struct Codebook {
  int n_tx = 1;
  std::vector<CMatrix> bases;
  std::vector<std::vector<Precoder>> by_rank;  // by_rank[r - 1][index]

  int max_rank() const { return static_cast<int>(by_rank.size()); }
  const Precoder& at(int rank, int index) const { return by_rank.at(rank - 1).at(index); }
  std::size_t size() const;
};

/// n_tx in {1, 2, 4}; throws std::invalid_argument otherwise.
Codebook build_codebook(int n_tx);

struct Interferer {
  CMatrix channel;   // n_rx x n_tx
  CMatrix precoder;  // n_tx x rank
  double power = 0;  // W, split evenly over the precoder's layers
};

/// noise * I + sum_i power_i / rank_i * (H_i P_i)(H_i P_i)^H.
CMatrix interference_covariance(int n_rx, std::span<const Interferer> interferers, double noise_power);

/// Adds power / rank * (H P)(H P)^H to `covariance`.
void add_interference(CMatrix& covariance, const CMatrix& channel, const CMatrix& precoder, double power);

/// Per-layer SINR of a linear MMSE receiver for the stream sqrt(power / r) H P s
/// against the given interference-plus-noise covariance. A singular covariance
/// is regularized, never rejected.
LayerSinr mmse_sinr(const CMatrix& channel, const CMatrix& precoder, double signal_power, const CMatrix& covariance);

LayerSinr compute_sinr(const CMatrix& channel, const CMatrix& precoder, double signal_power,
                       std::span<const Interferer> interferers, double noise_power);

struct PrecoderChoice {
  int rank = 1;
  int index = 0;
  double capacity = 0.0;  // sum over RBs and layers of log2(1 + SINR)
};

/// Wideband exhaustive codebook search over any number of RBs. Accumulates,
/// for every codebook entry, per-RB layer SINRs and the summed capacity.
class PrecoderSearch {
 public:
  PrecoderSearch(const Codebook& codebook, double signal_power);

  void add_rb(const CMatrix& channel, const CMatrix& covariance);
  /// Argmax capacity; ties go to the lowest rank, then the lowest index.
  PrecoderChoice best() const;
  const LayerSinr& layer_sinr(int rank, int index, int rb) const;
  int n_rb() const { return n_rb_; }
  void reset();

 private:
  const Codebook* codebook_;
  double signal_power_;
  int n_rb_ = 0;
  std::vector<std::size_t> offset_;  // flat entry offset per rank
  std::vector<double> capacity_;     // [entry]
  std::vector<LayerSinr> sinr_;      // [rb][entry]
  std::vector<CMatrix> projected_;   // per base, scratch
};

/// Single-RB search against per-receive-antenna noise plus interference.
PrecoderChoice select_precoder(const CMatrix& channel, const Codebook& codebook,
                               std::span<const double> noise_plus_interference, double signal_power);

struct RateModel {
  double efficiency = 0.6;  // fraction of Shannon capacity
  double se_cap = 7.4;      // bit/s/Hz
  double rb_bandwidth = kRbBandwidth;
  double tti = 1e-3;
};

/// Truncated, attenuated Shannon mapping: bits carried by one layer on one RB.
double sinr_to_rate(double sinr, const RateModel& model);

/// Sum over layers.
double layers_to_rate(const LayerSinr& sinr, const RateModel& model);

/// Thermal noise in W over `bandwidth` with the given noise figure.
double thermal_noise(double bandwidth_hz, double noise_figure_db);

}  // namespace mmw
