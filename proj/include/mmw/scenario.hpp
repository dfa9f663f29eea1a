#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmw/types.hpp"

namespace mmw {

/// Malformed scenario text: bad syntax, unknown key or unparsable value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed scenario that violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complete parameter set of one simulation point. Defaults reproduce the
/// reference network; the lower block holds model parameters the reference
/// table leaves open. Immutable once validated.
struct ScenarioConfig {
  double carrier_frequency = 28e9;  // Hz
  double bandwidth = 10e6;          // Hz
  int n_site_rings = 2;
  double inter_site_distance = 500.0;  // m
  double bs_height = 25.0;             // m
  double ue_height = 1.5;              // m
  int ues_per_sector = 30;
  double bs_tx_power = 40.0;  // W
  int n_tx = 4;
  int n_rx = 4;
  TransmissionMode transmission_mode = TransmissionMode::CLSM;
  double bs_pol_slant_deg = 45.0;
  Polarization ue_polarization = Polarization::LPOL;
  double ue_pol_slant_deg = 0.0;
  double electrical_downtilt_deg = 90.0;  // zenith-referenced: 90 is the horizon
  double mechanical_downtilt_deg = 0.0;
  double mechanical_slant_deg = 0.0;
  double azimuth_offset_deg = 60.0;
  int vertical_panels = 2;
  int horizontal_panels = 1;
  int elements_per_panel = 2;
  double ue_velocity = 0.0;  // km/h
  int n_tti = 50;
  double tti_duration = 1e-3;  // s
  SchedulerKind scheduler = SchedulerKind::RR;
  double pf_time_constant_tc = 20.0;  // TTIs
  double noise_figure = 9.0;          // dB
  double xpd_mean = 8.0;              // dB
  std::uint64_t seed = 1;

  double rate_efficiency = 0.6;                // truncated-Shannon attenuation
  double se_cap = 7.4;                         // bit/s/Hz per layer
  double coherence_rbs = 5.0;                  // RBs at 0.5 frequency correlation
  double rician_k_db = 9.0;                    // LOS links
  double shadowing_std_los_db = 4.0;
  double shadowing_std_nlos_db = 6.0;
  int feedback_delay_tti = 1;                  // CSI report age
  double depolarization_coherence_time = 1e-3 / 14.0;  // s
  bool position_update = false;
  bool kpi_all_sites = false;
  double pf_initial_throughput = 1e-3 * kRbBandwidth * 7.4;  // bits/TTI
  double max_element_gain_dbi = 8.0;
  double azimuth_beamwidth_deg = 65.0;
  double elevation_beamwidth_deg = 65.0;
  double front_back_ratio_db = 30.0;
  double sla_v_db = 30.0;
  double min_ue_distance = 10.0;          // m
  double interference_margin_db = 40.0;   // interferers weaker than serving - margin are dropped

  bool operator==(const ScenarioConfig&) const = default;

  int n_sites() const { return 1 + 3 * n_site_rings * (n_site_rings + 1); }
  int n_rb() const { return static_cast<int>(bandwidth / 200e3); }
  double run_duration() const { return n_tti * tti_duration; }
};

/// Names of every key accepted in a scenario file, in serialization order.
const std::vector<std::string>& scenario_keys();

/// Throws ValidationError naming the first violated invariant.
void validate(const ScenarioConfig& cfg);

/// Parses key = value text on top of `base`. `source` labels error messages.
/// `#` starts a comment; `velocity` and `polarization` are accepted as
/// short names for ue_velocity and ue_polarization.
ScenarioConfig parse_scenario(std::string_view text, const ScenarioConfig& base = {},
                              std::string_view source = "<scenario>");
ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioConfig& base = {});

/// Writes every key; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Named starting points: "paper" (the full 19-site network) and "small"
/// (7 sites, 5 UEs per sector) for desk-scale runs.
ScenarioConfig scenario_preset(std::string_view name);

/// Sets polarization together with its slant angle.
void set_polarization(ScenarioConfig& cfg, Polarization pol);

/// Cartesian product over the four sweep axes. Order: velocity outermost,
/// then polarization, scheduler, seed.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& base, const std::vector<double>& velocities,
                                         const std::vector<Polarization>& polarizations,
                                         const std::vector<SchedulerKind>& schedulers,
                                         const std::vector<std::uint64_t>& seeds);

}  // namespace mmw
