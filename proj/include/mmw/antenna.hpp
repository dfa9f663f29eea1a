#pragma once

#include <array>

#include "mmw/random.hpp"
#include "mmw/types.hpp"

namespace mmw {

struct ScenarioConfig;

struct AntennaConfig {
  double max_element_gain = 8.0;         // dBi
  double azimuth_3db_beamwidth = 65.0;   // deg
  double elevation_3db_beamwidth = 65.0; // deg
  double front_back_ratio = 30.0;        // dB
  double sla_v = 30.0;                   // dB
  double electrical_downtilt = 90.0;     // deg, zenith-referenced
  double mechanical_downtilt = 0.0;      // deg
  double mechanical_slant = 0.0;         // deg
  int vertical_panels = 2;
  int horizontal_panels = 1;
  int elements_per_panel = 2;

  int vertical_elements() const { return vertical_panels * elements_per_panel; }
  /// Elevation (deg, positive above the horizon) the vertical array is
  /// steered to: the zenith angle 90 maps to broadside.
  double steering_elevation() const { return 90.0 - electrical_downtilt; }

  static AntennaConfig from(const ScenarioConfig& cfg);
};

/// Sector element pattern in dB. Angles are relative to the (tilted)
/// boresight; the pattern is even in both.
double element_gain(const AntennaConfig& cfg, double azimuth_deg, double elevation_deg);

/// Gain in dB of the half-wavelength vertical stack steered to the electrical
/// tilt: |sum of element phasors|^2 / N. Peaks at 10 log10 N; floored 40 dB
/// below the peak so exact nulls stay finite.
double array_factor(const AntennaConfig& cfg, double elevation_deg);

/// Total BS antenna gain (dB) towards a UE seen at `azimuth_deg` from the
/// sector boresight and `elevation_deg` from the horizon.
double bs_antenna_gain(const AntennaConfig& cfg, double azimuth_deg, double elevation_deg);

struct PolarizationSpec {
  std::array<double, 2> tx_slants{45.0, -45.0};  // deg
  double rx_slant = 0.0;                          // deg
  double xpd = 8.0;                               // dB, may be +inf

  static PolarizationSpec from(const ScenarioConfig& cfg);
};

/// Rows: receive basis (rx slant, rx slant + 90). Columns: the two transmit
/// slants. Power launched on one transmit polarization arrives co-polar with
/// weight 1 and cross-polar with weight 10^(-xpd/10), the cross terms
/// carrying the given unit phasors; the result is projected onto the receive
/// basis. Every column has unit norm.
using CouplingMatrix = Eigen::Matrix2cd;
CouplingMatrix polarization_coupling(const PolarizationSpec& spec, const std::array<cd, 2>& leakage_phasors);

/// Same, with leakage phases drawn uniformly from `rng`.
CouplingMatrix polarization_coupling(const PolarizationSpec& spec, Rng& rng);

/// Fraction of received power that stays coherent with the CSI for a
/// receiver at `rx_slant` when the field component perpendicular to the
/// reference plane (0 deg) keeps only `perpendicular_coherence` of its power.
double coherent_fraction(double rx_slant_deg, double perpendicular_coherence);

}  // namespace mmw
