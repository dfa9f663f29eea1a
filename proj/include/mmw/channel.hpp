#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "mmw/random.hpp"
#include "mmw/types.hpp"

namespace mmw {

/// Urban-macro pathloss in dB. `d2d` is the horizontal distance in metres,
/// `fc` the carrier in Hz. Throws std::domain_error below 10 m.
double pathloss_uma(double d2d, double fc, double h_bs, double h_ut, bool los);

/// Urban-macro outdoor LOS probability for a UE at or below 13 m.
double los_probability(double d2d);

/// Maximum Doppler shift in Hz for a speed in km/h.
double doppler_frequency(double velocity_kmph, double fc);

/// Share of the perpendicular-plane received power that stays coherent over
/// the depolarization coherence time: J0(2 pi f_d t)^2 up to the first zero
/// of J0, zero beyond.
double perpendicular_coherence(double doppler_hz, double coherence_time);

/// Power-delay profile of the tapped-delay line behind frequency selectivity.
/// Delays are scaled so that resource blocks `coherence_rbs` apart
/// have a frequency correlation magnitude of exactly 0.5.
struct TapProfile {
  std::vector<double> delays;  // s
  std::vector<double> powers;  // linear, sum to 1

  static TapProfile for_coherence(double coherence_rbs);
  /// |E[h(f) h*(f + df)]| for unit-power taps.
  double frequency_correlation(double df) const;
  /// exp(-j 2 pi f_rb tau_l), row-major [rb][tap].
  std::vector<cd> rb_tap_table(int n_rb) const;
};

/// Large-scale state of one (cell, UE) link.
struct LargeScaleState {
  double pathloss = 0.0;      // dB
  bool los = false;
  double shadowing = 0.0;     // dB of extra loss, drawn once per run
  double antenna_gain = 0.0;  // dB, BS side

  double gain_db() const { return -pathloss - shadowing + antenna_gain; }
  /// Amplitude scaling of the small-scale channel (sqrt of linear gain).
  double amplitude() const { return std::pow(10.0, gain_db() / 20.0); }
};

/// Sum-of-sinusoids Rayleigh/Rician fading for an n_rx x n_tx link over a
/// tapped-delay line. Each sinusoid has a uniformly random arrival angle
/// inside its own 2 pi / M slot and a uniform phase, so the ensemble
/// autocorrelation of every tap is J0(2 pi f_d tau) and E|h|^2 = 1 for any
/// number of sinusoids. Advancing is a phasor rotation per TTI.
class JakesFading {
 public:
  static constexpr int kSinusoids = 8;

  struct LosComponent {
    double k_factor_db = 9.0;
    double doppler_cos = 1.0;  // cosine between heading and the LOS direction
  };

  JakesFading(int n_rx, int n_tx, const TapProfile& profile, double doppler_hz, double tti,
              std::optional<LosComponent> los, Rng& rng, long start_tti = 0);

  /// Per-RB channel at the current TTI; `out` is resized to n_rb.
  /// `rb_tap` comes from TapProfile::rb_tap_table(n_rb) of the same profile.
  void evaluate(const std::vector<cd>& rb_tap, int n_rb, std::vector<CMatrix>& out) const;
  void advance();
  long tti() const { return tti_; }
  double doppler_hz() const { return doppler_; }

 private:
  int n_rx_;
  int n_tx_;
  int n_taps_;
  double doppler_;
  long tti_;
  std::vector<double> tap_scale_;  // sqrt(p_l / M) times the diffuse share
  std::vector<cd> phasor_;          // [pair][tap][sinusoid]
  std::vector<cd> rotator_;
  std::vector<cd> los_phasor_;      // [pair], empty when NLOS
  cd los_rotator_{1.0, 0.0};
  mutable std::vector<cd> scratch_;
};

/// Unit-modulus Doppler-correlated phase process (one per leakage term).
class PhaseProcess {
 public:
  PhaseProcess(double doppler_hz, double tti, Rng& rng, long start_tti = 0);
  cd value() const;
  void advance();

 private:
  std::array<cd, JakesFading::kSinusoids> phasor_;
  std::array<cd, JakesFading::kSinusoids> rotator_;
};

/// Fading coefficients for a whole run: index as at(tti, rb).
struct FadingProcess {
  double doppler_hz = 0.0;
  int n_tti = 0;
  int n_rb = 0;
  std::vector<CMatrix> coefficients;

  const CMatrix& at(int tti, int rb) const { return coefficients[static_cast<std::size_t>(tti) * n_rb + rb]; }
};

FadingProcess generate_fading(double doppler_hz, int n_tti, double tti, int n_rb, std::optional<double> rician_k_db,
                              Rng& rng, int n_rx = 1, int n_tx = 1, double coherence_rbs = 5.0);

/// H = amplitude * F * diag(port_coupling). Throws std::invalid_argument on
/// dimension mismatch.
CMatrix assemble_channel(const LargeScaleState& ls, const CMatrix& fading, const CVector& port_coupling);

}  // namespace mmw
