#include "mmw/deployment.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mmw {

namespace {

// Axial hex directions; walking them k steps each traces ring k.
constexpr std::array<std::array<int, 2>, 6> kAxialDirections{{{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

Point axial_to_xy(int q, int r, double isd) {
  return {isd * (q + 0.5 * r), isd * (std::sqrt(3.0) / 2.0 * r)};
}

}  // namespace

SiteLayout build_hex_layout(int n_rings, double isd, double azimuth_offset_deg) {
  if (n_rings < 0) throw std::invalid_argument("build_hex_layout: n_rings must be >= 0");
  if (!(isd > 0)) throw std::invalid_argument("build_hex_layout: inter-site distance must be > 0");

  SiteLayout layout;
  layout.inter_site_distance = isd;
  auto add_site = [&](int q, int r) {
    const auto p = axial_to_xy(q, r, isd);
    layout.sites.push_back({static_cast<int>(layout.sites.size()), p.x, p.y});
  };

  add_site(0, 0);
  for (int ring = 1; ring <= n_rings; ++ring) {
    int q = kAxialDirections[4][0] * ring;
    int r = kAxialDirections[4][1] * ring;
    for (const auto& dir : kAxialDirections) {
      for (int step = 0; step < ring; ++step) {
        add_site(q, r);
        q += dir[0];
        r += dir[1];
      }
    }
  }

  for (const auto& site : layout.sites)
    for (int k = 0; k < 3; ++k)
      layout.sectors.push_back({site.site_id * 3 + k, site.site_id, wrap_degrees(azimuth_offset_deg + 120.0 * k)});
  return layout;
}

bool in_site_hexagon(const SiteLayout& layout, int site_id, Point p) {
  const auto& s = layout.sites.at(site_id);
  const double dx = p.x - s.x;
  const double dy = p.y - s.y;
  const double half = layout.inter_site_distance / 2.0;
  for (int k = 0; k < 6; ++k) {
    const double a = deg_to_rad(60.0 * k);
    if (dx * std::cos(a) + dy * std::sin(a) > half * (1.0 + 1e-12)) return false;
  }
  return true;
}

int sector_at(const SiteLayout& layout, int site_id, Point p) {
  const auto& s = layout.sites.at(site_id);
  const double az = rad_to_deg(std::atan2(p.y - s.y, p.x - s.x));
  int best = -1;
  double best_off = 1e9;
  for (int k = 0; k < 3; ++k) {
    const auto& sec = layout.sectors[site_id * 3 + k];
    const double off = std::abs(wrap_degrees(az - sec.boresight_deg));
    if (off < best_off) {
      best_off = off;
      best = sec.cell_id;
    }
  }
  return best;
}

std::vector<UeState> drop_ues(const SiteLayout& layout, int ues_per_sector, Rng& rng, double min_distance,
                              double height) {
  if (ues_per_sector < 1) throw std::invalid_argument("drop_ues: ues_per_sector must be >= 1");
  const double radius = layout.inter_site_distance / std::sqrt(3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<UeState> ues;
  ues.reserve(layout.sectors.size() * static_cast<std::size_t>(ues_per_sector));
  for (const auto& sec : layout.sectors) {
    const auto& site = layout.sites[sec.site_id];
    for (int i = 0; i < ues_per_sector; ++i) {
      Point p;
      for (;;) {
        const double r = radius * std::sqrt(unit(rng));
        const double phi = 2.0 * kPi * unit(rng);
        p = {site.x + r * std::cos(phi), site.y + r * std::sin(phi)};
        if (r >= min_distance && in_site_hexagon(layout, sec.site_id, p) &&
            sector_at(layout, sec.site_id, p) == sec.cell_id)
          break;
      }
      UeState ue;
      ue.ue_id = static_cast<int>(ues.size());
      ue.position = p;
      ue.height = height;
      ue.heading_deg = 360.0 * unit(rng);
      ue.drop_cell = sec.cell_id;
      ues.push_back(ue);
    }
  }
  return ues;
}

int assign_serving_cell(std::span<const double> power_dbm) {
  if (power_dbm.empty()) throw std::invalid_argument("assign_serving_cell: empty cell set");
  int best = 0;
  for (std::size_t c = 1; c < power_dbm.size(); ++c)
    if (power_dbm[c] > power_dbm[best]) best = static_cast<int>(c);
  return best;
}

UeState step_mobility(const UeState& ue, double dt, bool position_update) {
  if (!(dt > 0)) throw std::invalid_argument("step_mobility: dt must be > 0");
  UeState next = ue;
  if (position_update && ue.velocity > 0) {
    const double dist = ue.velocity / 3.6 * dt;
    next.position.x += dist * std::cos(deg_to_rad(ue.heading_deg));
    next.position.y += dist * std::sin(deg_to_rad(ue.heading_deg));
  }
  return next;
}

void write_layout_csv(const SiteLayout& layout, const std::filesystem::path& prefix) {
  const auto sites_path = prefix.string() + "_sites.csv";
  const auto sectors_path = prefix.string() + "_sectors.csv";
  std::ofstream sites(sites_path, std::ios::binary);
  std::ofstream sectors(sectors_path, std::ios::binary);
  if (!sites || !sectors) throw std::runtime_error("cannot write layout CSV at '" + prefix.string() + "'");
  char buf[128];
  sites << "site_id,x,y\n";
  for (const auto& s : layout.sites) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", s.site_id, s.x, s.y);
    sites << buf;
  }
  sectors << "cell_id,site_id,boresight_deg\n";
  for (const auto& s : layout.sectors) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6g\n", s.cell_id, s.site_id, s.boresight_deg);
    sectors << buf;
  }
}

}  // namespace mmw
