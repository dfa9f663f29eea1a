#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mmw/random.hpp"
#include "mmw/types.hpp"

namespace mmw {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Site {
  int site_id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Sector {
  int cell_id = 0;
  int site_id = 0;
  double boresight_deg = 0.0;
};

/// Hexagonal site grid, three sectors per site. cell_id = 3 * site_id + k,
/// site 0 at the origin, rings enumerated outwards.
struct SiteLayout {
  std::vector<Site> sites;
  std::vector<Sector> sectors;
  double inter_site_distance = 0.0;

  const Site& site_of(int cell_id) const { return sites[sectors[cell_id].site_id]; }
  int n_cells() const { return static_cast<int>(sectors.size()); }
};

struct UeState {
  int ue_id = 0;
  Point position;
  double height = 1.5;     // m
  double velocity = 0.0;   // km/h
  double heading_deg = 0.0;
  int drop_cell = -1;      // sector the UE was dropped into
  int serving_cell = -1;
  Polarization rx_polarization = Polarization::LPOL;
};

SiteLayout build_hex_layout(int n_rings, double isd, double azimuth_offset_deg);

/// True if `p` lies in the hexagonal cell of `site` (inter-site Voronoi cell).
bool in_site_hexagon(const SiteLayout& layout, int site_id, Point p);

/// Sector of `site_id` whose 120-degree wedge contains `p`.
int sector_at(const SiteLayout& layout, int site_id, Point p);

/// Uniform drop of `ues_per_sector` UEs into every sector region, excluding a
/// disc of radius `min_distance` around the site. UE ids are dense and follow
/// cell order. Serving cells are left unassigned.
std::vector<UeState> drop_ues(const SiteLayout& layout, int ues_per_sector, Rng& rng,
                              double min_distance = 10.0, double height = 1.5);

/// Argmax of wideband received power (dBm); ties go to the lowest cell id.
int assign_serving_cell(std::span<const double> wideband_rx_power_dbm);

/// Constant-velocity straight-line motion; identity unless `position_update`.
UeState step_mobility(const UeState& ue, double dt, bool position_update);

/// Two CSV files for plotting: <prefix>_sites.csv and <prefix>_sectors.csv.
void write_layout_csv(const SiteLayout& layout, const std::filesystem::path& prefix);

}  // namespace mmw
