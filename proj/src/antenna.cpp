#include "mmw/antenna.hpp"

#include <algorithm>
#include <cmath>

#include "mmw/scenario.hpp"

namespace mmw {

AntennaConfig AntennaConfig::from(const ScenarioConfig& c) {
  AntennaConfig a;
  a.max_element_gain = c.max_element_gain_dbi;
  a.azimuth_3db_beamwidth = c.azimuth_beamwidth_deg;
  a.elevation_3db_beamwidth = c.elevation_beamwidth_deg;
  a.front_back_ratio = c.front_back_ratio_db;
  a.sla_v = c.sla_v_db;
  a.electrical_downtilt = c.electrical_downtilt_deg;
  a.mechanical_downtilt = c.mechanical_downtilt_deg;
  a.mechanical_slant = c.mechanical_slant_deg;
  a.vertical_panels = c.vertical_panels;
  a.horizontal_panels = c.horizontal_panels;
  a.elements_per_panel = c.elements_per_panel;
  return a;
}

double element_gain(const AntennaConfig& cfg, double azimuth_deg, double elevation_deg) {
  const double az = wrap_degrees(azimuth_deg);
  const double a_az = std::min(12.0 * std::pow(az / cfg.azimuth_3db_beamwidth, 2), cfg.front_back_ratio);
  const double a_el = std::min(12.0 * std::pow(elevation_deg / cfg.elevation_3db_beamwidth, 2), cfg.sla_v);
  return cfg.max_element_gain - std::min(a_az + a_el, cfg.front_back_ratio);
}

double array_factor(const AntennaConfig& cfg, double elevation_deg) {
  const int n = cfg.vertical_elements();
  if (n <= 1) return 0.0;
  const double psi = kPi * (std::sin(deg_to_rad(elevation_deg)) - std::sin(deg_to_rad(cfg.steering_elevation())));
  cd sum{0.0, 0.0};
  for (int k = 0; k < n; ++k) sum += std::polar(1.0, psi * k);
  const double peak = static_cast<double>(n);
  const double gain = std::max(std::norm(sum) / n, peak * 1e-4);
  return linear_to_db(gain);
}

double bs_antenna_gain(const AntennaConfig& cfg, double azimuth_deg, double elevation_deg) {
  // Mechanical downtilt rotates the whole panel, so both the element pattern
  // and the array see the elevation relative to the tilted broadside.
  const double rel_el = elevation_deg + cfg.mechanical_downtilt;
  return element_gain(cfg, azimuth_deg, rel_el) + array_factor(cfg, rel_el);
}

PolarizationSpec PolarizationSpec::from(const ScenarioConfig& c) {
  PolarizationSpec s;
  s.tx_slants = {c.bs_pol_slant_deg + c.mechanical_slant_deg, -c.bs_pol_slant_deg + c.mechanical_slant_deg};
  s.rx_slant = c.ue_pol_slant_deg;
  s.xpd = c.xpd_mean;
  return s;
}

CouplingMatrix polarization_coupling(const PolarizationSpec& spec, const std::array<cd, 2>& leakage) {
  // Leakage amplitude relative to the co-polar path.
  const double a = std::isinf(spec.xpd) ? 0.0 : std::pow(10.0, -spec.xpd / 20.0);
  const double norm = 1.0 / std::sqrt(1.0 + a * a);

  Eigen::Matrix2cd depol;
  depol << 1.0, a * leakage[1], a * leakage[0], 1.0;
  depol *= norm;

  Eigen::Matrix2cd projection;
  const std::array<double, 2> rx{spec.rx_slant, spec.rx_slant + 90.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) projection(i, j) = std::cos(deg_to_rad(rx[i] - spec.tx_slants[j]));
  return projection * depol;
}

CouplingMatrix polarization_coupling(const PolarizationSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double p0 = phase(rng);
  const double p1 = phase(rng);
  return polarization_coupling(spec, {std::polar(1.0, p0), std::polar(1.0, p1)});
}

double coherent_fraction(double rx_slant_deg, double perpendicular_coherence) {
  const double c = std::cos(deg_to_rad(rx_slant_deg));
  const double s = std::sin(deg_to_rad(rx_slant_deg));
  return c * c + s * s * perpendicular_coherence;
}

}  // namespace mmw
